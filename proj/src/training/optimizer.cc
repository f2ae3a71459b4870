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

#include "mrp/training/optimizer.h"

#include <cmath>

#include "mrp/errors.h"

namespace mrp::training {

std::string optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "radam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "radam") return OptimizerKind::kRAdam;
  throw InputError("unknown optimizer '" + std::string(name) + "'");
}

template <typename T>
Optimizer<T>::Optimizer(const OptimizerConfig& config,
                        std::span<numcore::Parameter<T>* const> params)
    : config_(config), params_(params.begin(), params.end()) {
  if (!(config_.lr >= 0.0)) throw InputError("learning rate must be >= 0");
  for (const auto* p : params_) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

template <typename T>
void Optimizer<T>::step() {
  for (const auto* p : params_) {
    if (!p->grad.all_finite()) {
      throw NumericError("non-finite gradient in " + p->name);
    }
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, t_);
  const double bc2 = 1.0 - std::pow(b2, t_);

  // RAdam rectification; Adam ignores these.
  bool rectified = true;
  double rect = 1.0;
  if (config_.kind == OptimizerKind::kRAdam) {
    const double rho_inf = 2.0 / (1.0 - b2) - 1.0;
    const double rho_t = rho_inf - 2.0 * t_ * std::pow(b2, t_) / bc2;
    rectified = rho_t > 5.0;
    if (rectified) {
      rect = std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                       ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    }
  }

  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto* p = params_[k];
    auto value = p->value.values();
    auto grad = p->grad.values();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double m_hat = m[i] / bc1;
      double update;
      if (config_.kind == OptimizerKind::kAdam) {
        update = m_hat / (std::sqrt(v[i] / bc2) + config_.eps);
      } else if (rectified) {
        update = m_hat * rect * std::sqrt(bc2) / (std::sqrt(v[i]) + config_.eps);
      } else {
        update = m_hat;
      }
      value[i] = static_cast<T>(value[i] - config_.lr * update);
    }
    p->zero_grad();
  }
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace mrp::training
