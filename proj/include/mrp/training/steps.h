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

#ifndef MRP_TRAINING_STEPS_H_
#define MRP_TRAINING_STEPS_H_

#include <cstdint>
#include <span>

#include "mrp/corpus/types.h"
#include "mrp/encoder/model.h"
#include "mrp/training/mask.h"

namespace mrp::training {

using Batch = std::span<const corpus::Example* const>;

struct StepResult {
  double loss = 0.0;  // mean over the counted positions (or examples)
  int correct = 0;    // argmax hits among them
  int count = 0;
};

// Rationale cross-entropy for one sequence, restricted to rows with
// loss_mask set. `inputs` empty means no rationale input. When
// grad_scale != 0 the gradient of grad_scale * loss is accumulated into the
// model; nothing is zeroed.
template <typename T>
StepResult rationale_loss(encoder::EncoderModel<T>& model,
                          std::span<const int> ids,
                          std::span<const encoder::RationaleInput> inputs,
                          std::span<const int> targets,
                          std::span<const std::uint8_t> loss_mask,
                          double grad_scale,
                          numcore::Rng* dropout_rng = nullptr);

// The MRP input for one example: gold bits on real words, kMasked on
// plan.positions. Length attention_len.
std::vector<encoder::RationaleInput> mrp_input(const corpus::Example& example,
                                               const MaskPlan& plan);

// The following zero all gradients, then accumulate the gradient of the
// batch loss. The loss is pooled: a mean over every counted position in the
// batch (masked positions for mrp/rp/mlm, examples for detect).

template <typename T>
StepResult mrp_step(encoder::EncoderModel<T>& model, Batch batch,
                    std::span<const MaskPlan> plans,
                    numcore::Rng* dropout_rng = nullptr);

// Plain rationale prediction: no rationale input, every word position
// scored.
template <typename T>
StepResult rp_step(encoder::EncoderModel<T>& model, Batch batch,
                   numcore::Rng* dropout_rng = nullptr);

// Token ids at plan positions are replaced by [MASK] and predicted by the
// token head.
template <typename T>
StepResult mlm_step(encoder::EncoderModel<T>& model, Batch batch,
                    std::span<const MaskPlan> plans,
                    numcore::Rng* dropout_rng = nullptr);

// 3-class cross-entropy on the CLS head with rationale-free input.
template <typename T>
StepResult detect_step(encoder::EncoderModel<T>& model, Batch batch,
                       numcore::Rng* dropout_rng = nullptr);

}  // namespace mrp::training

#endif  // MRP_TRAINING_STEPS_H_
