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

#ifndef MRP_ENCODER_CLASSIFIER_H_
#define MRP_ENCODER_CLASSIFIER_H_

#include <array>
#include <span>
#include <vector>

#include "mrp/encoder/model.h"

namespace mrp::encoder {

using ClassProbs = std::array<double, 3>;

// Anything that maps a token sequence to 3-class probabilities. The
// explainers and faithfulness metrics only see this interface, so tests can
// plug in hand-built models.
class Classifier {
 public:
  virtual ~Classifier() = default;
  // `ids` is [CLS] ... [SEP] [PAD]...; only the first real_len are real.
  virtual ClassProbs class_probs(std::span<const int> ids,
                                 int real_len) const = 0;
};

// Detection-stage inference: rationale-free input, softmax of the CLS head.
class EncoderClassifier : public Classifier {
 public:
  explicit EncoderClassifier(const EncoderModel<float>& model)
      : model_(model) {}
  ClassProbs class_probs(std::span<const int> ids,
                         int real_len) const override;

 private:
  const EncoderModel<float>& model_;
};

int argmax(const ClassProbs& p);

}  // namespace mrp::encoder

#endif  // MRP_ENCODER_CLASSIFIER_H_
