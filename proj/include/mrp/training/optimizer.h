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

#ifndef MRP_TRAINING_OPTIMIZER_H_
#define MRP_TRAINING_OPTIMIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrp/numcore/matrix.h"
#include "mrp/numcore/parameter.h"

namespace mrp::training {

enum class OptimizerKind { kAdam, kRAdam };

std::string optimizer_name(OptimizerKind kind);
// Throws InputError on anything but "adam" or "radam".
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam, or RAdam with the variance-rectification switch at rho_t > 5 (the
// PyTorch formulation). Moments live in double regardless of T.
template <typename T>
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config,
            std::span<numcore::Parameter<T>* const> params);

  // Applies one update from the current gradients, then zeroes them.
  // Throws NumericError (before touching any value) if a gradient is not
  // finite.
  void step();

  int steps() const { return t_; }
  const OptimizerConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  OptimizerConfig config_;
  std::vector<numcore::Parameter<T>*> params_;
  std::vector<std::vector<double>> m_, v_;
  int t_ = 0;
};

}  // namespace mrp::training

#endif  // MRP_TRAINING_OPTIMIZER_H_
