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

#ifndef MRP_CORPUS_TYPES_H_
#define MRP_CORPUS_TYPES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrp::corpus {

// Fixed class ids, shared by reports and checkpoints.
enum class Label : int { kNormal = 0, kOffensive = 1, kHatespeech = 2 };

inline constexpr int kNumClasses = 3;

std::string_view label_name(Label label);
// Accepts "normal", "offensive", "hatespeech" (and "hate speech").
std::optional<Label> parse_label(std::string_view name);

inline bool is_toxic(Label label) { return label != Label::kNormal; }

// The ten target communities reported by the bias metrics.
inline constexpr std::array<std::string_view, 10> kTargetGroups = {
    "African", "Islam",   "Jewish", "Homosexual", "Women",
    "Refugee", "Arab",    "Caucasian", "Asian",   "Hispanic"};

struct Annotation {
  Label label = Label::kNormal;
  std::vector<std::string> targets;
};

// One post as annotated, before aggregation.
struct RawPost {
  std::string post_id;
  std::vector<std::string> post_tokens;
  std::vector<Annotation> annotators;
  // One binary vector per annotator who marked a rationale.
  std::vector<std::vector<int>> rationales;

  // Throws InputError (naming post_id) on empty annotators or a rationale
  // whose length differs from post_tokens.
  void validate() const;
};

// An aggregated, encoded post.
//
// token_ids has the fixed model length: [CLS] w_1 .. w_k [SEP] [PAD]...
// gold_rationale is aligned to token_ids and is 0 at CLS, SEP and PAD.
struct Example {
  std::string id;
  std::vector<int> token_ids;
  int attention_len = 0;  // real positions including CLS and SEP
  Label label = Label::kNormal;
  std::vector<std::uint8_t> gold_rationale;
  std::vector<std::string> target_groups;  // sorted, unique
  std::vector<std::string> words;          // the k kept words

  int word_count() const { return attention_len - 2; }
  // Rationale bits of the real words only (positions 1..k).
  std::vector<std::uint8_t> word_rationale() const {
    return {gold_rationale.begin() + 1,
            gold_rationale.begin() + 1 + word_count()};
  }
};

}  // namespace mrp::corpus

#endif  // MRP_CORPUS_TYPES_H_
