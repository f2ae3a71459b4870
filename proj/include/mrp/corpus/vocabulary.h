// Copyright 2026 The MRP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MRP_CORPUS_VOCABULARY_H_
#define MRP_CORPUS_VOCABULARY_H_

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mrp/corpus/types.h"

namespace mrp::corpus {

// Word-level token <-> id map. Specials sit at fixed ids: [CLS]=0,
// [SEP]=1, [PAD]=2, [UNK]=3, and [MASK]=4 for masked language modelling.
class Vocabulary {
 public:
  static constexpr int kCls = 0;
  static constexpr int kSep = 1;
  static constexpr int kPad = 2;
  static constexpr int kUnk = 3;
  static constexpr int kMask = 4;
  static constexpr int kNumSpecial = 5;

  Vocabulary();

  // Every word of `train` occurring at least `min_freq` times gets an id,
  // in order of decreasing frequency, ties broken lexicographically.
  static Vocabulary build(std::span<const RawPost> train, int min_freq);

  // Unknown words map to kUnk.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(id_to_token_.size()); }
  int min_freq() const { return min_freq_; }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  void add(const std::string& token);

  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
  int min_freq_ = 1;
};

}  // namespace mrp::corpus

#endif  // MRP_CORPUS_VOCABULARY_H_
