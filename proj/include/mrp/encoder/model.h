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

#ifndef MRP_ENCODER_MODEL_H_
#define MRP_ENCODER_MODEL_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mrp/encoder/config.h"
#include "mrp/numcore/matrix.h"
#include "mrp/numcore/ops.h"
#include "mrp/numcore/parameter.h"
#include "mrp/numcore/rng.h"

namespace mrp::encoder {

using numcore::BasicMatrix;
using numcore::Parameter;
using numcore::Rng;

// Per-position rationale input of the embedding layer. kMasked positions
// (and CLS/SEP/PAD positions, whatever their value) get a zero vector.
enum class RationaleInput : std::uint8_t { kZero = 0, kOne = 1, kMasked = 2 };

template <typename T>
struct BlockParams {
  Parameter<T> ln1_gain, ln1_bias;
  Parameter<T> wq, bq, wk, bk, wv, bv, wo, bo;
  Parameter<T> ln2_gain, ln2_bias;
  Parameter<T> w1, b1, w2, b2;
};

template <typename T>
struct LayerCache {
  numcore::LayerNormCache<T> ln1, ln2;
  BasicMatrix<T> ln1_out, q, k, v, context;
  BasicMatrix<T> ln2_out, ff_pre, ff_act;
  // Inverted-dropout scales (0 or 1/(1-p)); empty when dropout is off.
  BasicMatrix<T> attn_drop, ff_drop;
};

// Everything the forward pass produced for one sequence of `real_len`
// positions. Positions past real_len (PAD) are never computed, so they
// carry zero attention weight by construction.
template <typename T>
struct ForwardTrace {
  int real_len = 0;
  std::vector<BasicMatrix<T>> hidden;                  // H^(0..L)
  std::vector<std::vector<BasicMatrix<T>>> attention;  // [layer][head]
  BasicMatrix<T> output;  // final layer norm of H^(L); both heads read it
  std::vector<LayerCache<T>> layers;
  numcore::LayerNormCache<T> final_ln;
};

// Pre-norm transformer encoder with token, position and rationale
// embeddings, a per-token rationale MLP head, a CLS classification head and
// an optional token-prediction head.
//
// Forward methods are const and safe to call concurrently; backward methods
// accumulate into the parameter gradients.
template <typename T>
class EncoderModel {
 public:
  explicit EncoderModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }

  // normal(0, 0.02) weights, zero biases, unit norm gains. Each tensor
  // draws from rng.derive(name), so values do not depend on order.
  void initialize(const Rng& rng);
  // Fresh class head drawn from rng.derive("class_head/" + name).
  void reinitialize_class_head(const Rng& rng);

  // Manifest order, used by checkpoints and the optimizer.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  std::vector<Parameter<T>*> class_head_parameters();
  std::vector<Parameter<T>*> rationale_head_parameters();
  std::vector<Parameter<T>*> mlm_head_parameters();
  Parameter<T>* find(std::string_view name);
  void zero_grad();

  // H^(0)[i] = tok[id_i] + pos[i] + r_i. An empty `rationales` span means
  // the rationale input is absent (all zero). Returns token_ids.size() rows.
  BasicMatrix<T> embed(std::span<const int> token_ids,
                       std::span<const RationaleInput> rationales = {}) const;
  void embed_backward(std::span<const int> token_ids,
                      std::span<const RationaleInput> rationales,
                      const BasicMatrix<T>& d_h0);

  // Runs the blocks on rows [0, real_len) of h0. `dropout_rng` enables
  // dropout when non-null and dropout_rate > 0. Throws NumericError on a
  // non-finite activation.
  ForwardTrace<T> forward(const BasicMatrix<T>& h0, int real_len,
                          Rng* dropout_rng = nullptr) const;
  // Given d(loss)/d(trace.output), accumulates block gradients and returns
  // d(loss)/d(H^(0)) for the real rows.
  BasicMatrix<T> backward(const ForwardTrace<T>& trace,
                          const BasicMatrix<T>& d_output);

  // [real_len x 2], the MLP applied at every position.
  BasicMatrix<T> rationale_logits(const ForwardTrace<T>& trace) const;
  BasicMatrix<T> rationale_head_backward(const ForwardTrace<T>& trace,
                                         const BasicMatrix<T>& d_logits);
  // [1 x n_classes], linear map of the CLS row.
  BasicMatrix<T> class_logits(const ForwardTrace<T>& trace) const;
  BasicMatrix<T> class_head_backward(const ForwardTrace<T>& trace,
                                     const BasicMatrix<T>& d_logits);
  // [real_len x vocab_size]. Requires config().mlm_head.
  BasicMatrix<T> mlm_logits(const ForwardTrace<T>& trace) const;
  BasicMatrix<T> mlm_head_backward(const ForwardTrace<T>& trace,
                                   const BasicMatrix<T>& d_logits);

  template <typename U>
  EncoderModel<U> cast() const {
    EncoderModel<U> out(config_);
    auto src = parameters();
    auto dst = out.parameters();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i]->value = src[i]->value.template cast<U>();
    }
    return out;
  }

  Parameter<T> token_embedding;
  Parameter<T> position_embedding;
  Parameter<T> rationale_embedding;
  std::vector<BlockParams<T>> blocks;
  Parameter<T> final_gain, final_bias;
  Parameter<T> rationale_w1, rationale_b1, rationale_w2, rationale_b2;
  Parameter<T> class_w, class_b;
  Parameter<T> mlm_w, mlm_b;  // empty unless config().mlm_head

 private:
  ModelConfig config_;
};

// Row 0 (the CLS query) of the last layer's attention, reduced over heads
// by mean, or by max when `head_max`. Length real_len.
template <typename T>
std::vector<double> last_layer_cls_attention(const ForwardTrace<T>& trace,
                                             bool head_max = false);

}  // namespace mrp::encoder

#endif  // MRP_ENCODER_MODEL_H_
