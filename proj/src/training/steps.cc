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

#include "mrp/training/steps.h"

#include <vector>

#include "mrp/corpus/vocabulary.h"
#include "mrp/errors.h"

namespace mrp::training {

using encoder::EncoderModel;
using encoder::RationaleInput;
using numcore::BasicMatrix;

namespace {

template <typename T>
void scale_inplace(BasicMatrix<T>& m, double s) {
  for (auto& v : m.values()) v = static_cast<T>(v * s);
}

template <typename T>
int count_hits(const BasicMatrix<T>& logits, std::span<const int> targets,
               std::span<const std::uint8_t> mask) {
  int hits = 0;
  for (int i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    hits += best == targets[i];
  }
  return hits;
}

std::span<const int> real_ids(const corpus::Example& ex) {
  return std::span<const int>(ex.token_ids).first(ex.attention_len);
}

std::vector<int> rationale_targets(const corpus::Example& ex) {
  return {ex.gold_rationale.begin(),
          ex.gold_rationale.begin() + ex.attention_len};
}

std::vector<std::uint8_t> plan_mask(const corpus::Example& ex,
                                    const MaskPlan& plan) {
  std::vector<std::uint8_t> mask(ex.attention_len, 0);
  for (int p : plan.positions) mask.at(p) = 1;
  return mask;
}

void check_plans(Batch batch, std::span<const MaskPlan> plans) {
  if (plans.size() != batch.size()) {
    throw InputError("mask plans not aligned with batch");
  }
}

int total_positions(std::span<const MaskPlan> plans) {
  int n = 0;
  for (const auto& p : plans) n += static_cast<int>(p.positions.size());
  if (n == 0) throw InputError("batch has no masked positions");
  return n;
}

void accumulate(StepResult& into, const StepResult& r, double weight) {
  into.loss += r.loss * weight;
  into.correct += r.correct;
  into.count += r.count;
}

// Shared by mrp and rp: rp is mrp with every position masked and no input.
template <typename T>
StepResult rationale_batch(EncoderModel<T>& model, Batch batch,
                           std::span<const MaskPlan> plans, bool feed,
                           numcore::Rng* dropout_rng) {
  check_plans(batch, plans);
  model.zero_grad();
  const int total = total_positions(plans);
  StepResult out;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = *batch[b];
    const double w =
        static_cast<double>(plans[b].positions.size()) / total;
    const auto inputs =
        feed ? mrp_input(ex, plans[b]) : std::vector<RationaleInput>{};
    const auto targets = rationale_targets(ex);
    const auto mask = plan_mask(ex, plans[b]);
    accumulate(out,
               rationale_loss(model, real_ids(ex), inputs, targets, mask, w,
                              dropout_rng),
               w);
  }
  return out;
}

}  // namespace

template <typename T>
StepResult rationale_loss(EncoderModel<T>& model, std::span<const int> ids,
                          std::span<const RationaleInput> inputs,
                          std::span<const int> targets,
                          std::span<const std::uint8_t> loss_mask,
                          double grad_scale, numcore::Rng* dropout_rng) {
  const int n = static_cast<int>(ids.size());
  const auto h0 = model.embed(ids, inputs);
  const auto tr = model.forward(h0, n, dropout_rng);
  const auto logits = model.rationale_logits(tr);
  auto ce = numcore::cross_entropy(logits, targets, loss_mask);
  StepResult r;
  r.loss = ce.loss;
  r.correct = count_hits(logits, targets, loss_mask);
  for (auto m : loss_mask) r.count += m != 0;
  if (grad_scale != 0.0) {
    scale_inplace(ce.dlogits, grad_scale);
    const auto d_out = model.rationale_head_backward(tr, ce.dlogits);
    model.embed_backward(ids, inputs, model.backward(tr, d_out));
  }
  return r;
}

std::vector<RationaleInput> mrp_input(const corpus::Example& example,
                                      const MaskPlan& plan) {
  std::vector<RationaleInput> r(example.attention_len);
  for (int i = 0; i < example.attention_len; ++i) {
    r[i] = example.gold_rationale[i] ? RationaleInput::kOne
                                     : RationaleInput::kZero;
  }
  for (int p : plan.positions) r.at(p) = RationaleInput::kMasked;
  return r;
}

template <typename T>
StepResult mrp_step(EncoderModel<T>& model, Batch batch,
                    std::span<const MaskPlan> plans,
                    numcore::Rng* dropout_rng) {
  return rationale_batch(model, batch, plans, true, dropout_rng);
}

template <typename T>
StepResult rp_step(EncoderModel<T>& model, Batch batch,
                   numcore::Rng* dropout_rng) {
  std::vector<MaskPlan> plans;
  for (const auto* ex : batch) plans.push_back({eligible_positions(*ex), 1.0});
  return rationale_batch(model, batch, plans, false, dropout_rng);
}

template <typename T>
StepResult mlm_step(EncoderModel<T>& model, Batch batch,
                    std::span<const MaskPlan> plans,
                    numcore::Rng* dropout_rng) {
  check_plans(batch, plans);
  model.zero_grad();
  const int total = total_positions(plans);
  StepResult out;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = *batch[b];
    const double w =
        static_cast<double>(plans[b].positions.size()) / total;
    const std::vector<int> targets(ex.token_ids.begin(),
                                   ex.token_ids.begin() + ex.attention_len);
    std::vector<int> ids = targets;
    for (int p : plans[b].positions) ids.at(p) = corpus::Vocabulary::kMask;
    const auto mask = plan_mask(ex, plans[b]);
    const auto tr = model.forward(model.embed(ids), ex.attention_len,
                                  dropout_rng);
    const auto logits = model.mlm_logits(tr);
    auto ce = numcore::cross_entropy(logits, std::span<const int>(targets),
                                     std::span<const std::uint8_t>(mask));
    out.loss += ce.loss * w;
    out.correct += count_hits(logits, std::span<const int>(targets),
                              std::span<const std::uint8_t>(mask));
    out.count += static_cast<int>(plans[b].positions.size());
    scale_inplace(ce.dlogits, w);
    const auto d_out = model.mlm_head_backward(tr, ce.dlogits);
    model.embed_backward(ids, {}, model.backward(tr, d_out));
  }
  return out;
}

template <typename T>
StepResult detect_step(EncoderModel<T>& model, Batch batch,
                       numcore::Rng* dropout_rng) {
  if (batch.empty()) throw InputError("empty batch");
  model.zero_grad();
  const double w = 1.0 / static_cast<double>(batch.size());
  const std::uint8_t one[] = {1};
  StepResult out;
  for (const auto* ex : batch) {
    const auto ids = real_ids(*ex);
    const auto tr = model.forward(model.embed(ids), ex->attention_len,
                                  dropout_rng);
    const auto logits = model.class_logits(tr);
    const int target[] = {static_cast<int>(ex->label)};
    auto ce = numcore::cross_entropy(logits, std::span<const int>(target),
                                     std::span<const std::uint8_t>(one));
    out.loss += ce.loss * w;
    out.correct += count_hits(logits, std::span<const int>(target),
                              std::span<const std::uint8_t>(one));
    out.count += 1;
    scale_inplace(ce.dlogits, w);
    const auto d_out = model.class_head_backward(tr, ce.dlogits);
    model.embed_backward(ids, {}, model.backward(tr, d_out));
  }
  return out;
}

#define MRP_INSTANTIATE_STEPS(T)                                              \
  template StepResult rationale_loss(                                         \
      EncoderModel<T>&, std::span<const int>, std::span<const RationaleInput>, \
      std::span<const int>, std::span<const std::uint8_t>, double,            \
      numcore::Rng*);                                                         \
  template StepResult mrp_step(EncoderModel<T>&, Batch,                       \
                               std::span<const MaskPlan>, numcore::Rng*);     \
  template StepResult rp_step(EncoderModel<T>&, Batch, numcore::Rng*);        \
  template StepResult mlm_step(EncoderModel<T>&, Batch,                       \
                               std::span<const MaskPlan>, numcore::Rng*);     \
  template StepResult detect_step(EncoderModel<T>&, Batch, numcore::Rng*);

MRP_INSTANTIATE_STEPS(float)
MRP_INSTANTIATE_STEPS(double)

}  // namespace mrp::training
