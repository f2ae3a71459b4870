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

#ifndef MRP_NUMCORE_GRAD_CHECK_H_
#define MRP_NUMCORE_GRAD_CHECK_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mrp/numcore/parameter.h"
#include "mrp/numcore/rng.h"

namespace mrp::numcore {

struct GradCheckOptions {
  double eps = 1e-3;
  // Coordinates sampled per parameter; parameters with fewer entries are
  // checked exhaustively.
  int samples_per_param = 100;
  // Denominator floor of the relative error, so coordinates whose true
  // gradient is zero compare by absolute error instead.
  double denominator_floor = 1e-8;
};

struct GradCheckEntry {
  std::string param;
  int coords = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  int coords_checked = 0;
  std::vector<GradCheckEntry> per_param;
};

// Compares analytic gradients to central differences.
//
// `loss_and_grad` must zero every parameter gradient, compute the scalar
// loss, and fill the gradients. It is called once for the analytic values
// and twice per sampled coordinate. Relative error is
// |analytic - numeric| / max(|analytic| + |numeric|, floor).
// Throws NumericError on a non-finite loss.
template <typename T>
GradCheckReport grad_check(const std::function<double()>& loss_and_grad,
                           std::span<Parameter<T>* const> params, Rng& rng,
                           const GradCheckOptions& options = {});

}  // namespace mrp::numcore

#endif  // MRP_NUMCORE_GRAD_CHECK_H_
