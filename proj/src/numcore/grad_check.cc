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

#include "mrp/numcore/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mrp::numcore {
namespace {

double checked(double loss) {
  if (!std::isfinite(loss)) throw NumericError("grad_check: non-finite loss");
  return loss;
}

// Partial Fisher-Yates: `count` distinct indices in [0, n).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count,
                                        Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (count >= n) return idx;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_int(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

template <typename T>
GradCheckReport grad_check(const std::function<double()>& loss_and_grad,
                           std::span<Parameter<T>* const> params, Rng& rng,
                           const GradCheckOptions& options) {
  checked(loss_and_grad());
  std::vector<BasicMatrix<T>> analytic;
  analytic.reserve(params.size());
  for (const auto* p : params) analytic.push_back(p->grad);

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter<T>& p = *params[pi];
    GradCheckEntry entry{p.name, 0, 0.0};
    const auto coords = sample_indices(
        p.value.size(), static_cast<std::size_t>(options.samples_per_param),
        rng);
    for (std::size_t c : coords) {
      T& w = p.value.values()[c];
      const T saved = w;
      w = saved + static_cast<T>(options.eps);
      const double plus = checked(loss_and_grad());
      w = saved - static_cast<T>(options.eps);
      const double minus = checked(loss_and_grad());
      w = saved;
      // The effective step is what the scalar type could represent.
      const double h = static_cast<double>(static_cast<T>(saved + static_cast<T>(options.eps))) -
                       static_cast<double>(static_cast<T>(saved - static_cast<T>(options.eps)));
      const double numeric = (plus - minus) / h;
      const double a = analytic[pi].values()[c];
      const double denom =
          std::max(std::abs(a) + std::abs(numeric), options.denominator_floor);
      const double rel = std::abs(a - numeric) / denom;
      entry.max_rel_error = std::max(entry.max_rel_error, rel);
      ++entry.coords;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.coords_checked += entry.coords;
    report.per_param.push_back(std::move(entry));
  }
  // Leave the gradients as the caller's analytic values.
  checked(loss_and_grad());
  return report;
}

template GradCheckReport grad_check<float>(const std::function<double()>&,
                                           std::span<Parameter<float>* const>,
                                           Rng&, const GradCheckOptions&);
template GradCheckReport grad_check<double>(
    const std::function<double()>&, std::span<Parameter<double>* const>, Rng&,
    const GradCheckOptions&);

}  // namespace mrp::numcore
