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

#ifndef MRP_NUMCORE_OPS_H_
#define MRP_NUMCORE_OPS_H_

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "mrp/numcore/matrix.h"

namespace mrp::numcore {

inline constexpr double kLayerNormEps = 1e-5;

// All kernels sum in a fixed order (row-major, left to right over the
// contraction index), so identical inputs give bitwise identical outputs.

// a · b. Throws InputError when a.cols != b.rows.
template <typename T>
BasicMatrix<T> matmul(const BasicMatrix<T>& a, const BasicMatrix<T>& b);

// a · bᵀ.
template <typename T>
BasicMatrix<T> matmul_bt(const BasicMatrix<T>& a, const BasicMatrix<T>& b);

// out += aᵀ · b. Used for weight gradients.
template <typename T>
void accumulate_at_b(const BasicMatrix<T>& a, const BasicMatrix<T>& b,
                     BasicMatrix<T>& out);

// m[i, :] += bias[0, :] for every row.
template <typename T>
void add_row_vector(BasicMatrix<T>& m, const BasicMatrix<T>& bias);

// out[0, j] += sum_i m[i, j].
template <typename T>
void accumulate_column_sums(const BasicMatrix<T>& m, BasicMatrix<T>& out);

// out += m, elementwise.
template <typename T>
void accumulate(const BasicMatrix<T>& m, BasicMatrix<T>& out);

// Row-wise softmax with max subtraction.
template <typename T>
BasicMatrix<T> softmax_rows(const BasicMatrix<T>& m);

template <typename T>
struct LayerNormCache {
  BasicMatrix<T> normalized;  // (x - mean) * rstd
  std::vector<T> rstd;        // 1 / sqrt(var + eps), one per row
};

// Normalizes each row to zero mean and unit variance, then applies
// gain/bias (both 1 x cols). `cache` may be null at inference time.
template <typename T>
BasicMatrix<T> layer_norm(const BasicMatrix<T>& x, const BasicMatrix<T>& gain,
                          const BasicMatrix<T>& bias, double eps,
                          std::type_identity_t<LayerNormCache<T>>* cache);

// Returns dx; accumulates into dgain / dbias.
template <typename T>
BasicMatrix<T> layer_norm_backward(const BasicMatrix<T>& dy,
                                   const BasicMatrix<T>& gain,
                                   const LayerNormCache<T>& cache,
                                   BasicMatrix<T>& dgain,
                                   BasicMatrix<T>& dbias);

// tanh-approximation GELU.
template <typename T>
BasicMatrix<T> gelu(const BasicMatrix<T>& x);

// dy * gelu'(x), where x is the pre-activation.
template <typename T>
BasicMatrix<T> gelu_backward(const BasicMatrix<T>& x, const BasicMatrix<T>& dy);

template <typename T>
struct CrossEntropyResult {
  double loss = 0.0;
  BasicMatrix<T> dlogits;
};

// Mean negative log-likelihood over rows with mask[i] != 0. Unmasked rows
// get an exactly-zero gradient. Throws InputError when the mask selects no
// row or a selected target is out of range.
template <typename T>
CrossEntropyResult<T> cross_entropy(const BasicMatrix<T>& logits,
                                    std::span<const int> targets,
                                    std::span<const std::uint8_t> mask);

}  // namespace mrp::numcore

#endif  // MRP_NUMCORE_OPS_H_
