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

#include "mrp/numcore/ops.h"

#include <cmath>
#include <limits>
#include <string>

namespace mrp::numcore {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace

template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  require(a.cols() == b.rows(), "matmul shape mismatch " + shape_string(a) +
                                    " * " + shape_string(b));
  BasicMatrix<T> out(a.rows(), b.cols());
  const int n = b.cols();
  for (int i = 0; i < a.rows(); ++i) {
    T* o = out.row(i).data();
    const T* ai = a.row(i).data();
    for (int k = 0; k < a.cols(); ++k) {
      const T s = ai[k];
      const T* bk = b.row(k).data();
      for (int j = 0; j < n; ++j) o[j] += s * bk[j];
    }
  }
  return out;
}

template <typename T>
BasicMatrix<T> matmul_bt(const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  require(a.cols() == b.cols(), "matmul_bt shape mismatch " + shape_string(a) +
                                    " * " + shape_string(b) + "^T");
  BasicMatrix<T> out(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const T* ai = a.row(i).data();
    for (int j = 0; j < b.rows(); ++j) {
      const T* bj = b.row(j).data();
      T s = 0;
      for (int k = 0; k < a.cols(); ++k) s += ai[k] * bj[k];
      out(i, j) = s;
    }
  }
  return out;
}

template <typename T>
void accumulate_at_b(const BasicMatrix<T>& a, const BasicMatrix<T>& b,
                     BasicMatrix<T>& out) {
  require(a.rows() == b.rows() && out.rows() == a.cols() &&
              out.cols() == b.cols(),
          "accumulate_at_b shape mismatch " + shape_string(a) + "^T * " +
              shape_string(b) + " -> " + shape_string(out));
  const int n = b.cols();
  for (int r = 0; r < a.rows(); ++r) {
    const T* ar = a.row(r).data();
    const T* br = b.row(r).data();
    for (int i = 0; i < a.cols(); ++i) {
      const T s = ar[i];
      if (s == T(0)) continue;
      T* o = out.row(i).data();
      for (int j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
}

template <typename T>
void add_row_vector(BasicMatrix<T>& m, const BasicMatrix<T>& bias) {
  require(bias.rows() == 1 && bias.cols() == m.cols(),
          "bias shape " + shape_string(bias) + " for " + shape_string(m));
  for (int i = 0; i < m.rows(); ++i) {
    T* r = m.row(i).data();
    for (int j = 0; j < m.cols(); ++j) r[j] += bias(0, j);
  }
}

template <typename T>
void accumulate_column_sums(const BasicMatrix<T>& m, BasicMatrix<T>& out) {
  require(out.rows() == 1 && out.cols() == m.cols(),
          "column-sum target " + shape_string(out) + " for " + shape_string(m));
  for (int i = 0; i < m.rows(); ++i) {
    const T* r = m.row(i).data();
    for (int j = 0; j < m.cols(); ++j) out(0, j) += r[j];
  }
}

template <typename T>
void accumulate(const BasicMatrix<T>& m, BasicMatrix<T>& out) {
  require(m.same_shape(out), "accumulate shape mismatch " + shape_string(m) +
                                 " vs " + shape_string(out));
  auto src = m.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

template <typename T>
BasicMatrix<T> softmax_rows(const BasicMatrix<T>& m) {
  BasicMatrix<T> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    auto in = m.row(i);
    auto o = out.row(i);
    T mx = -std::numeric_limits<T>::infinity();
    for (T v : in) mx = std::max(mx, v);
    T sum = 0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (T& v : o) v /= sum;
  }
  return out;
}

template <typename T>
BasicMatrix<T> layer_norm(const BasicMatrix<T>& x, const BasicMatrix<T>& gain,
                          const BasicMatrix<T>& bias, double eps,
                          std::type_identity_t<LayerNormCache<T>>* cache) {
  require(gain.rows() == 1 && gain.cols() == x.cols() &&
              bias.same_shape(gain),
          "layer_norm gain/bias shape mismatch for " + shape_string(x));
  const int n = x.cols();
  BasicMatrix<T> out(x.rows(), n);
  if (cache != nullptr) {
    cache->normalized = BasicMatrix<T>(x.rows(), n);
    cache->rstd.assign(x.rows(), T(0));
  }
  for (int i = 0; i < x.rows(); ++i) {
    auto xi = x.row(i);
    T mean = 0;
    for (T v : xi) mean += v;
    mean /= static_cast<T>(n);
    T var = 0;
    for (T v : xi) var += (v - mean) * (v - mean);
    var /= static_cast<T>(n);
    const T rstd = T(1) / std::sqrt(var + static_cast<T>(eps));
    auto o = out.row(i);
    for (int j = 0; j < n; ++j) {
      const T xhat = (xi[j] - mean) * rstd;
      if (cache != nullptr) cache->normalized(i, j) = xhat;
      o[j] = xhat * gain(0, j) + bias(0, j);
    }
    if (cache != nullptr) cache->rstd[i] = rstd;
  }
  return out;
}

template <typename T>
BasicMatrix<T> layer_norm_backward(const BasicMatrix<T>& dy,
                                   const BasicMatrix<T>& gain,
                                   const LayerNormCache<T>& cache,
                                   BasicMatrix<T>& dgain,
                                   BasicMatrix<T>& dbias) {
  require(dy.same_shape(cache.normalized), "layer_norm_backward shape");
  const int n = dy.cols();
  BasicMatrix<T> dx(dy.rows(), n);
  std::vector<T> dxhat(n);
  for (int i = 0; i < dy.rows(); ++i) {
    auto g = dy.row(i);
    auto xhat = cache.normalized.row(i);
    T mean_d = 0;
    T mean_dx = 0;
    for (int j = 0; j < n; ++j) {
      dgain(0, j) += g[j] * xhat[j];
      dbias(0, j) += g[j];
      dxhat[j] = g[j] * gain(0, j);
      mean_d += dxhat[j];
      mean_dx += dxhat[j] * xhat[j];
    }
    mean_d /= static_cast<T>(n);
    mean_dx /= static_cast<T>(n);
    auto o = dx.row(i);
    for (int j = 0; j < n; ++j) {
      o[j] = cache.rstd[i] * (dxhat[j] - mean_d - xhat[j] * mean_dx);
    }
  }
  return dx;
}

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

}  // namespace

template <typename T>
BasicMatrix<T> gelu(const BasicMatrix<T>& x) {
  BasicMatrix<T> out(x.rows(), x.cols());
  auto in = x.values();
  auto o = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T v = in[i];
    const T u = static_cast<T>(kGeluC) * (v + static_cast<T>(kGeluA) * v * v * v);
    o[i] = T(0.5) * v * (T(1) + std::tanh(u));
  }
  return out;
}

template <typename T>
BasicMatrix<T> gelu_backward(const BasicMatrix<T>& x, const BasicMatrix<T>& dy) {
  require(x.same_shape(dy), "gelu_backward shape");
  BasicMatrix<T> out(x.rows(), x.cols());
  auto in = x.values();
  auto g = dy.values();
  auto o = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const T v = in[i];
    const T u = static_cast<T>(kGeluC) * (v + static_cast<T>(kGeluA) * v * v * v);
    const T t = std::tanh(u);
    const T du = static_cast<T>(kGeluC) *
                 (T(1) + T(3) * static_cast<T>(kGeluA) * v * v);
    o[i] = g[i] * (T(0.5) * (T(1) + t) + T(0.5) * v * (T(1) - t * t) * du);
  }
  return out;
}

template <typename T>
CrossEntropyResult<T> cross_entropy(const BasicMatrix<T>& logits,
                                    std::span<const int> targets,
                                    std::span<const std::uint8_t> mask) {
  require(static_cast<int>(targets.size()) == logits.rows() &&
              static_cast<int>(mask.size()) == logits.rows(),
          "cross_entropy: targets/mask length must equal logits rows (" +
              std::to_string(logits.rows()) + ")");
  int count = 0;
  for (auto m : mask) count += m != 0;
  require(count > 0, "cross_entropy: mask selects no rows");

  CrossEntropyResult<T> result;
  result.dlogits = BasicMatrix<T>(logits.rows(), logits.cols());
  const T inv = T(1) / static_cast<T>(count);
  double total = 0.0;
  for (int i = 0; i < logits.rows(); ++i) {
    if (mask[i] == 0) continue;
    const int t = targets[i];
    require(t >= 0 && t < logits.cols(),
            "cross_entropy: target " + std::to_string(t) + " out of range");
    auto z = logits.row(i);
    T mx = -std::numeric_limits<T>::infinity();
    for (T v : z) mx = std::max(mx, v);
    T sum = 0;
    for (T v : z) sum += std::exp(v - mx);
    const T log_norm = mx + std::log(sum);
    total += static_cast<double>(log_norm - z[t]);
    auto d = result.dlogits.row(i);
    for (int j = 0; j < logits.cols(); ++j) {
      const T p = std::exp(z[j] - log_norm);
      d[j] = (p - (j == t ? T(1) : T(0))) * inv;
    }
  }
  result.loss = total / count;
  if (!std::isfinite(result.loss)) throw NumericError("cross_entropy: non-finite loss");
  return result;
}

#define MRP_INSTANTIATE_OPS(T)                                                 \
  template BasicMatrix<T> matmul(const BasicMatrix<T>&, const BasicMatrix<T>&); \
  template BasicMatrix<T> matmul_bt(const BasicMatrix<T>&,                    \
                                    const BasicMatrix<T>&);                   \
  template void accumulate_at_b(const BasicMatrix<T>&, const BasicMatrix<T>&, \
                                BasicMatrix<T>&);                             \
  template void add_row_vector(BasicMatrix<T>&, const BasicMatrix<T>&);       \
  template void accumulate_column_sums(const BasicMatrix<T>&,                 \
                                       BasicMatrix<T>&);                      \
  template void accumulate(const BasicMatrix<T>&, BasicMatrix<T>&);           \
  template BasicMatrix<T> softmax_rows(const BasicMatrix<T>&);                \
  template BasicMatrix<T> layer_norm(const BasicMatrix<T>&,                   \
                                     const BasicMatrix<T>&,                   \
                                     const BasicMatrix<T>&, double,           \
                                     LayerNormCache<T>*);                     \
  template BasicMatrix<T> layer_norm_backward(                                \
      const BasicMatrix<T>&, const BasicMatrix<T>&, const LayerNormCache<T>&, \
      BasicMatrix<T>&, BasicMatrix<T>&);                                      \
  template BasicMatrix<T> gelu(const BasicMatrix<T>&);                        \
  template BasicMatrix<T> gelu_backward(const BasicMatrix<T>&,                \
                                        const BasicMatrix<T>&);               \
  template CrossEntropyResult<T> cross_entropy(                               \
      const BasicMatrix<T>&, std::span<const int>,                            \
      std::span<const std::uint8_t>);

MRP_INSTANTIATE_OPS(float)
MRP_INSTANTIATE_OPS(double)

#undef MRP_INSTANTIATE_OPS

}  // namespace mrp::numcore
