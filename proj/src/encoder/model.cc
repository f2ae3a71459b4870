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

#include "mrp/encoder/model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrp/corpus/vocabulary.h"
#include "mrp/errors.h"

namespace mrp::encoder {

using numcore::accumulate;
using numcore::accumulate_at_b;
using numcore::accumulate_column_sums;
using numcore::add_row_vector;
using numcore::check_finite;
using numcore::kLayerNormEps;
using numcore::matmul;
using numcore::matmul_bt;

namespace {

template <typename T>
void init_param(Parameter<T>& p, const Rng& rng, const std::string& key) {
  const auto& n = p.name;
  const bool is_gain = n.ends_with("gain");
  const bool is_bias = n.ends_with("bias") || n.ends_with(".b") ||
                       n.ends_with("b1") || n.ends_with("b2") ||
                       n.ends_with(".bq") || n.ends_with(".bk") ||
                       n.ends_with(".bv") || n.ends_with(".bo");
  if (is_gain) {
    p.value.fill(T(1));
  } else if (is_bias) {
    p.value.fill(T(0));
  } else {
    Rng r = rng.derive(key);
    for (auto& v : p.value.values()) v = static_cast<T>(0.02 * r.normal());
  }
  p.zero_grad();
}

// Columns [h*dh, (h+1)*dh) of m.
template <typename T>
BasicMatrix<T> head_slice(const BasicMatrix<T>& m, int h, int dh) {
  BasicMatrix<T> out(m.rows(), dh);
  for (int i = 0; i < m.rows(); ++i) {
    for (int c = 0; c < dh; ++c) out(i, c) = m(i, h * dh + c);
  }
  return out;
}

template <typename T>
void head_scatter(const BasicMatrix<T>& src, int h, int dh,
                  BasicMatrix<T>& dst) {
  for (int i = 0; i < src.rows(); ++i) {
    for (int c = 0; c < dh; ++c) dst(i, h * dh + c) = src(i, c);
  }
}

template <typename T>
BasicMatrix<T> affine(const BasicMatrix<T>& x, const Parameter<T>& w,
                      const Parameter<T>& b) {
  BasicMatrix<T> y = matmul(x, w.value);
  add_row_vector(y, b.value);
  return y;
}

// Accumulates dW, db for y = x W + b and returns dx.
template <typename T>
BasicMatrix<T> affine_backward(const BasicMatrix<T>& x, const BasicMatrix<T>& dy,
                               Parameter<T>& w, Parameter<T>& b) {
  accumulate_at_b(x, dy, w.grad);
  accumulate_column_sums(dy, b.grad);
  return matmul_bt(dy, w.value);
}

template <typename T>
BasicMatrix<T> dropout_scales(int rows, int cols, double rate, Rng& rng) {
  BasicMatrix<T> s(rows, cols);
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& v : s.values()) v = rng.uniform() < rate ? T(0) : keep;
  return s;
}

template <typename T>
void multiply_inplace(BasicMatrix<T>& m, const BasicMatrix<T>& s) {
  auto a = m.values();
  auto b = s.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
}

bool is_special_position(int id) {
  return id == corpus::Vocabulary::kCls || id == corpus::Vocabulary::kSep ||
         id == corpus::Vocabulary::kPad;
}

}  // namespace

template <typename T>
EncoderModel<T>::EncoderModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  const int d = config_.d_model;
  token_embedding = Parameter<T>("embed.token", config_.vocab_size, d);
  position_embedding = Parameter<T>("embed.position", config_.max_len, d);
  rationale_embedding =
      Parameter<T>("embed.rationale", config_.n_rationale_classes, d);
  for (int l = 0; l < config_.n_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    BlockParams<T> b;
    b.ln1_gain = Parameter<T>(p + "ln1.gain", 1, d);
    b.ln1_bias = Parameter<T>(p + "ln1.bias", 1, d);
    b.wq = Parameter<T>(p + "attn.wq", d, d);
    b.bq = Parameter<T>(p + "attn.bq", 1, d);
    b.wk = Parameter<T>(p + "attn.wk", d, d);
    b.bk = Parameter<T>(p + "attn.bk", 1, d);
    b.wv = Parameter<T>(p + "attn.wv", d, d);
    b.bv = Parameter<T>(p + "attn.bv", 1, d);
    b.wo = Parameter<T>(p + "attn.wo", d, d);
    b.bo = Parameter<T>(p + "attn.bo", 1, d);
    b.ln2_gain = Parameter<T>(p + "ln2.gain", 1, d);
    b.ln2_bias = Parameter<T>(p + "ln2.bias", 1, d);
    b.w1 = Parameter<T>(p + "ff.w1", d, config_.ff_dim);
    b.b1 = Parameter<T>(p + "ff.b1", 1, config_.ff_dim);
    b.w2 = Parameter<T>(p + "ff.w2", config_.ff_dim, d);
    b.b2 = Parameter<T>(p + "ff.b2", 1, d);
    blocks.push_back(std::move(b));
  }
  final_gain = Parameter<T>("final_norm.gain", 1, d);
  final_bias = Parameter<T>("final_norm.bias", 1, d);
  final_gain.value.fill(T(1));
  for (auto& b : blocks) {
    b.ln1_gain.value.fill(T(1));
    b.ln2_gain.value.fill(T(1));
  }
  rationale_w1 = Parameter<T>("rationale_head.w1", d, d);
  rationale_b1 = Parameter<T>("rationale_head.b1", 1, d);
  rationale_w2 = Parameter<T>("rationale_head.w2", d, config_.n_rationale_classes);
  rationale_b2 = Parameter<T>("rationale_head.b2", 1, config_.n_rationale_classes);
  class_w = Parameter<T>("class_head.w", d, config_.n_classes);
  class_b = Parameter<T>("class_head.b", 1, config_.n_classes);
  if (config_.mlm_head) {
    mlm_w = Parameter<T>("mlm_head.w", d, config_.vocab_size);
    mlm_b = Parameter<T>("mlm_head.b", 1, config_.vocab_size);
  }
}

template <typename T>
void EncoderModel<T>::initialize(const Rng& rng) {
  for (auto* p : parameters()) init_param(*p, rng, p->name);
}

template <typename T>
void EncoderModel<T>::reinitialize_class_head(const Rng& rng) {
  for (auto* p : class_head_parameters()) {
    init_param(*p, rng, "class_head/" + p->name);
  }
}

template <typename T>
std::vector<Parameter<T>*> EncoderModel<T>::parameters() {
  std::vector<Parameter<T>*> out{&token_embedding, &position_embedding,
                                 &rationale_embedding};
  for (auto& b : blocks) {
    for (auto* p : {&b.ln1_gain, &b.ln1_bias, &b.wq, &b.bq, &b.wk, &b.bk,
                    &b.wv, &b.bv, &b.wo, &b.bo, &b.ln2_gain, &b.ln2_bias,
                    &b.w1, &b.b1, &b.w2, &b.b2}) {
      out.push_back(p);
    }
  }
  out.push_back(&final_gain);
  out.push_back(&final_bias);
  for (auto* p : rationale_head_parameters()) out.push_back(p);
  for (auto* p : class_head_parameters()) out.push_back(p);
  for (auto* p : mlm_head_parameters()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> EncoderModel<T>::parameters() const {
  auto mut = const_cast<EncoderModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

template <typename T>
std::vector<Parameter<T>*> EncoderModel<T>::class_head_parameters() {
  return {&class_w, &class_b};
}

template <typename T>
std::vector<Parameter<T>*> EncoderModel<T>::rationale_head_parameters() {
  return {&rationale_w1, &rationale_b1, &rationale_w2, &rationale_b2};
}

template <typename T>
std::vector<Parameter<T>*> EncoderModel<T>::mlm_head_parameters() {
  if (!config_.mlm_head) return {};
  return {&mlm_w, &mlm_b};
}

template <typename T>
Parameter<T>* EncoderModel<T>::find(std::string_view name) {
  for (auto* p : parameters()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

template <typename T>
void EncoderModel<T>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::embed(
    std::span<const int> token_ids,
    std::span<const RationaleInput> rationales) const {
  const int n = static_cast<int>(token_ids.size());
  if (n > config_.max_len) {
    throw InputError("sequence length " + std::to_string(n) +
                     " exceeds max_len " + std::to_string(config_.max_len));
  }
  if (!rationales.empty() && rationales.size() != token_ids.size()) {
    throw InputError("rationale input length " +
                     std::to_string(rationales.size()) + " != token count " +
                     std::to_string(n));
  }
  const int d = config_.d_model;
  BasicMatrix<T> h(n, d);
  for (int i = 0; i < n; ++i) {
    const int id = token_ids[i];
    if (id < 0 || id >= config_.vocab_size) {
      throw InputError("token id " + std::to_string(id) + " out of range");
    }
    auto row = h.row(i);
    auto tok = token_embedding.value.row(id);
    auto pos = position_embedding.value.row(i);
    for (int c = 0; c < d; ++c) row[c] = tok[c] + pos[c];
    if (!rationales.empty() && rationales[i] != RationaleInput::kMasked &&
        !is_special_position(id)) {
      auto r = rationale_embedding.value.row(static_cast<int>(rationales[i]));
      for (int c = 0; c < d; ++c) row[c] += r[c];
    }
  }
  return h;
}

template <typename T>
void EncoderModel<T>::embed_backward(std::span<const int> token_ids,
                                     std::span<const RationaleInput> rationales,
                                     const BasicMatrix<T>& d_h0) {
  const int d = config_.d_model;
  for (int i = 0; i < d_h0.rows(); ++i) {
    const int id = token_ids[i];
    auto g = d_h0.row(i);
    auto tok = token_embedding.grad.row(id);
    auto pos = position_embedding.grad.row(i);
    for (int c = 0; c < d; ++c) {
      tok[c] += g[c];
      pos[c] += g[c];
    }
    if (!rationales.empty() && rationales[i] != RationaleInput::kMasked &&
        !is_special_position(id)) {
      auto r = rationale_embedding.grad.row(static_cast<int>(rationales[i]));
      for (int c = 0; c < d; ++c) r[c] += g[c];
    }
  }
}

template <typename T>
ForwardTrace<T> EncoderModel<T>::forward(const BasicMatrix<T>& h0,
                                         int real_len, Rng* dropout_rng) const {
  if (real_len < 2 || real_len > h0.rows()) {
    throw InputError("forward: real_len " + std::to_string(real_len) +
                     " outside [2, " + std::to_string(h0.rows()) + "]");
  }
  const int n = real_len;
  const int heads = config_.n_heads;
  const int dh = config_.d_model / heads;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
  const bool dropout = dropout_rng != nullptr && config_.dropout_rate > 0.0;

  ForwardTrace<T> tr;
  tr.real_len = n;
  tr.hidden.push_back(h0.slice_rows(0, n));
  for (const auto& b : blocks) {
    const BasicMatrix<T>& x = tr.hidden.back();
    LayerCache<T> c;
    c.ln1_out = numcore::layer_norm(x, b.ln1_gain.value, b.ln1_bias.value,
                                    kLayerNormEps, &c.ln1);
    c.q = affine(c.ln1_out, b.wq, b.bq);
    c.k = affine(c.ln1_out, b.wk, b.bk);
    c.v = affine(c.ln1_out, b.wv, b.bv);
    c.context = BasicMatrix<T>(n, config_.d_model);
    std::vector<BasicMatrix<T>> maps;
    for (int h = 0; h < heads; ++h) {
      const auto qh = head_slice(c.q, h, dh);
      const auto kh = head_slice(c.k, h, dh);
      const auto vh = head_slice(c.v, h, dh);
      BasicMatrix<T> scores = matmul_bt(qh, kh);
      for (auto& s : scores.values()) s *= scale;
      BasicMatrix<T> p = numcore::softmax_rows(scores);
      head_scatter(matmul(p, vh), h, dh, c.context);
      maps.push_back(std::move(p));
    }
    tr.attention.push_back(std::move(maps));
    BasicMatrix<T> attn_out = affine(c.context, b.wo, b.bo);
    if (dropout) {
      c.attn_drop = dropout_scales<T>(n, config_.d_model, config_.dropout_rate,
                                      *dropout_rng);
      multiply_inplace(attn_out, c.attn_drop);
    }
    BasicMatrix<T> x1 = x;
    accumulate(attn_out, x1);

    c.ln2_out = numcore::layer_norm(x1, b.ln2_gain.value, b.ln2_bias.value,
                                    kLayerNormEps, &c.ln2);
    c.ff_pre = affine(c.ln2_out, b.w1, b.b1);
    c.ff_act = numcore::gelu(c.ff_pre);
    BasicMatrix<T> ff_out = affine(c.ff_act, b.w2, b.b2);
    if (dropout) {
      c.ff_drop = dropout_scales<T>(n, config_.d_model, config_.dropout_rate,
                                    *dropout_rng);
      multiply_inplace(ff_out, c.ff_drop);
    }
    accumulate(ff_out, x1);
    check_finite(x1, "encoder block output");
    tr.layers.push_back(std::move(c));
    tr.hidden.push_back(std::move(x1));
  }
  tr.output = numcore::layer_norm(tr.hidden.back(), final_gain.value,
                                  final_bias.value, kLayerNormEps, &tr.final_ln);
  check_finite(tr.output, "encoder output");
  return tr;
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::backward(const ForwardTrace<T>& tr,
                                         const BasicMatrix<T>& d_output) {
  const int n = tr.real_len;
  const int heads = config_.n_heads;
  const int dh = config_.d_model / heads;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  BasicMatrix<T> dx = numcore::layer_norm_backward(
      d_output, final_gain.value, tr.final_ln, final_gain.grad, final_bias.grad);
  for (int l = config_.n_layers - 1; l >= 0; --l) {
    auto& b = blocks[l];
    const auto& c = tr.layers[l];

    // Feed-forward branch: x2 = x1 + ff(ln2(x1)).
    BasicMatrix<T> d_ff = dx;
    if (!c.ff_drop.empty()) multiply_inplace(d_ff, c.ff_drop);
    BasicMatrix<T> d_act = affine_backward(c.ff_act, d_ff, b.w2, b.b2);
    BasicMatrix<T> d_pre = numcore::gelu_backward(c.ff_pre, d_act);
    BasicMatrix<T> d_ln2 = affine_backward(c.ln2_out, d_pre, b.w1, b.b1);
    accumulate(numcore::layer_norm_backward(d_ln2, b.ln2_gain.value, c.ln2,
                                            b.ln2_gain.grad, b.ln2_bias.grad),
               dx);

    // Attention branch: x1 = x0 + attn(ln1(x0)).
    BasicMatrix<T> d_attn = dx;
    if (!c.attn_drop.empty()) multiply_inplace(d_attn, c.attn_drop);
    BasicMatrix<T> d_context = affine_backward(c.context, d_attn, b.wo, b.bo);
    BasicMatrix<T> dq(n, config_.d_model), dk(n, config_.d_model),
        dv(n, config_.d_model);
    for (int h = 0; h < heads; ++h) {
      const auto qh = head_slice(c.q, h, dh);
      const auto kh = head_slice(c.k, h, dh);
      const auto vh = head_slice(c.v, h, dh);
      const auto& p = tr.attention[l][h];
      const auto dctx = head_slice(d_context, h, dh);
      BasicMatrix<T> dp = matmul_bt(dctx, vh);
      BasicMatrix<T> dvh(n, dh);
      accumulate_at_b(p, dctx, dvh);
      BasicMatrix<T> ds(n, n);
      for (int i = 0; i < n; ++i) {
        T dot = 0;
        for (int j = 0; j < n; ++j) dot += dp(i, j) * p(i, j);
        for (int j = 0; j < n; ++j) ds(i, j) = p(i, j) * (dp(i, j) - dot) * scale;
      }
      BasicMatrix<T> dqh = matmul(ds, kh);
      BasicMatrix<T> dkh(n, dh);
      accumulate_at_b(ds, qh, dkh);
      head_scatter(dqh, h, dh, dq);
      head_scatter(dkh, h, dh, dk);
      head_scatter(dvh, h, dh, dv);
    }
    BasicMatrix<T> d_ln1 = affine_backward(c.ln1_out, dq, b.wq, b.bq);
    accumulate(affine_backward(c.ln1_out, dk, b.wk, b.bk), d_ln1);
    accumulate(affine_backward(c.ln1_out, dv, b.wv, b.bv), d_ln1);
    accumulate(numcore::layer_norm_backward(d_ln1, b.ln1_gain.value, c.ln1,
                                            b.ln1_gain.grad, b.ln1_bias.grad),
               dx);
  }
  return dx;
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::rationale_logits(
    const ForwardTrace<T>& tr) const {
  const auto act = numcore::gelu(affine(tr.output, rationale_w1, rationale_b1));
  return affine(act, rationale_w2, rationale_b2);
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::rationale_head_backward(
    const ForwardTrace<T>& tr, const BasicMatrix<T>& d_logits) {
  const auto pre = affine(tr.output, rationale_w1, rationale_b1);
  const auto act = numcore::gelu(pre);
  const auto d_act = affine_backward(act, d_logits, rationale_w2, rationale_b2);
  const auto d_pre = numcore::gelu_backward(pre, d_act);
  return affine_backward(tr.output, d_pre, rationale_w1, rationale_b1);
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::class_logits(const ForwardTrace<T>& tr) const {
  return affine(tr.output.slice_rows(0, 1), class_w, class_b);
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::class_head_backward(
    const ForwardTrace<T>& tr, const BasicMatrix<T>& d_logits) {
  const auto d_cls =
      affine_backward(tr.output.slice_rows(0, 1), d_logits, class_w, class_b);
  BasicMatrix<T> d_out(tr.real_len, config_.d_model);
  std::copy(d_cls.values().begin(), d_cls.values().end(), d_out.row(0).begin());
  return d_out;
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::mlm_logits(const ForwardTrace<T>& tr) const {
  if (!config_.mlm_head) throw InputError("model has no MLM head");
  return affine(tr.output, mlm_w, mlm_b);
}

template <typename T>
BasicMatrix<T> EncoderModel<T>::mlm_head_backward(
    const ForwardTrace<T>& tr, const BasicMatrix<T>& d_logits) {
  if (!config_.mlm_head) throw InputError("model has no MLM head");
  return affine_backward(tr.output, d_logits, mlm_w, mlm_b);
}

template <typename T>
std::vector<double> last_layer_cls_attention(const ForwardTrace<T>& tr,
                                             bool head_max) {
  const auto& maps = tr.attention.back();
  std::vector<double> out(tr.real_len, 0.0);
  for (const auto& p : maps) {
    for (int j = 0; j < tr.real_len; ++j) {
      const double v = p(0, j);
      out[j] = head_max ? std::max(out[j], v) : out[j] + v;
    }
  }
  if (!head_max) {
    for (auto& v : out) v /= static_cast<double>(maps.size());
  }
  return out;
}

template class EncoderModel<float>;
template class EncoderModel<double>;
template std::vector<double> last_layer_cls_attention(
    const ForwardTrace<float>&, bool);
template std::vector<double> last_layer_cls_attention(
    const ForwardTrace<double>&, bool);

}  // namespace mrp::encoder
