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

#ifndef MRP_NUMCORE_PARAMETER_H_
#define MRP_NUMCORE_PARAMETER_H_

#include <string>

#include "mrp/numcore/matrix.h"

namespace mrp::numcore {

// A trainable tensor and its gradient, always of the same shape.
template <typename T>
struct Parameter {
  std::string name;
  BasicMatrix<T> value;
  BasicMatrix<T> grad;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void zero_grad() { grad.set_zero(); }
};

}  // namespace mrp::numcore

#endif  // MRP_NUMCORE_PARAMETER_H_
