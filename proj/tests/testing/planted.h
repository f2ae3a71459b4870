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

#ifndef MRP_TESTING_PLANTED_H_
#define MRP_TESTING_PLANTED_H_

// Hand-built classifiers whose explanations are known in advance.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "mrp/corpus/types.h"
#include "mrp/corpus/vocabulary.h"
#include "mrp/encoder/classifier.h"

namespace mrp::testing {

class ConstantClassifier : public encoder::Classifier {
 public:
  explicit ConstantClassifier(encoder::ClassProbs p) : p_(p) {}
  encoder::ClassProbs class_probs(std::span<const int>, int) const override {
    return p_;
  }

 private:
  encoder::ClassProbs p_;
};

// P(hatespeech) = hi when token `planted` is among the real positions,
// lo otherwise; the rest of the mass goes to normal.
class SingleTokenClassifier : public encoder::Classifier {
 public:
  SingleTokenClassifier(int planted, double hi = 0.95, double lo = 0.05)
      : planted_(planted), hi_(hi), lo_(lo) {}
  encoder::ClassProbs class_probs(std::span<const int> ids,
                                  int real_len) const override {
    const auto real = ids.first(real_len);
    const bool present =
        std::find(real.begin(), real.end(), planted_) != real.end();
    const double p = present ? hi_ : lo_;
    return {1.0 - p, 0.0, p};
  }

 private:
  int planted_;
  double hi_, lo_;
};

inline corpus::Example WordExample(std::string id, std::vector<int> words,
                                   std::vector<std::uint8_t> bits = {},
                                   corpus::Label label =
                                       corpus::Label::kHatespeech,
                                   int max_len = 0) {
  using corpus::Vocabulary;
  if (bits.empty()) bits.assign(words.size(), 0);
  corpus::Example ex;
  ex.id = std::move(id);
  ex.label = label;
  ex.token_ids.push_back(Vocabulary::kCls);
  ex.gold_rationale.push_back(0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    ex.token_ids.push_back(words[i]);
    ex.gold_rationale.push_back(bits[i]);
    ex.words.push_back("t" + std::to_string(words[i]));
  }
  ex.token_ids.push_back(Vocabulary::kSep);
  ex.gold_rationale.push_back(0);
  ex.attention_len = static_cast<int>(ex.token_ids.size());
  while (static_cast<int>(ex.token_ids.size()) < max_len) {
    ex.token_ids.push_back(Vocabulary::kPad);
    ex.gold_rationale.push_back(0);
  }
  return ex;
}

}  // namespace mrp::testing

#endif  // MRP_TESTING_PLANTED_H_
