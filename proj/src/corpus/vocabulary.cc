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

#include "mrp/corpus/vocabulary.h"

#include <algorithm>
#include <map>

#include "mrp/errors.h"

namespace mrp::corpus {

Vocabulary::Vocabulary() {
  for (const char* s : {"[CLS]", "[SEP]", "[PAD]", "[UNK]", "[MASK]"}) add(s);
}

void Vocabulary::add(const std::string& token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

Vocabulary Vocabulary::build(std::span<const RawPost> train, int min_freq) {
  if (min_freq < 1) throw InputError("min_freq must be >= 1");
  std::map<std::string, int> counts;
  for (const auto& post : train) {
    for (const auto& w : post.post_tokens) ++counts[w];
  }
  std::vector<std::pair<std::string, int>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_freq) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  Vocabulary vocab;
  vocab.min_freq_ = min_freq;
  for (const auto& [w, c] : kept) {
    if (!vocab.contains(w)) vocab.add(w);
  }
  return vocab;
}

int Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw InputError("token id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[id];
}

nlohmann::json Vocabulary::to_json() const {
  return {{"min_freq", min_freq_}, {"tokens", id_to_token_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary vocab;
  try {
    vocab.min_freq_ = j.at("min_freq").get<int>();
    const auto tokens = j.at("tokens").get<std::vector<std::string>>();
    if (tokens.size() < kNumSpecial) throw InputError("vocab lacks specials");
    for (int i = 0; i < kNumSpecial; ++i) {
      if (tokens[i] != vocab.id_to_token_[i]) {
        throw InputError("vocab special id " + std::to_string(i) +
                         " is '" + tokens[i] + "'");
      }
    }
    for (std::size_t i = kNumSpecial; i < tokens.size(); ++i) {
      if (vocab.contains(tokens[i])) {
        throw InputError("duplicate vocab token '" + tokens[i] + "'");
      }
      vocab.add(tokens[i]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed vocabulary: ") + e.what());
  }
  return vocab;
}

}  // namespace mrp::corpus
