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

#ifndef MRP_ENCODER_CONFIG_H_
#define MRP_ENCODER_CONFIG_H_

#include "json.hpp"

namespace mrp::encoder {

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int ff_dim = 256;
  int max_len = 64;
  int n_classes = 3;
  int n_rationale_classes = 2;
  double dropout_rate = 0.0;
  // Token-prediction head (d -> vocab_size), only for the MLM stage.
  bool mlm_head = false;

  // Throws InputError on inconsistent values (d_model % n_heads != 0,
  // max_len < 3, ...).
  void validate() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace mrp::encoder

#endif  // MRP_ENCODER_CONFIG_H_
