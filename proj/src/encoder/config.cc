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

#include "mrp/encoder/config.h"

#include <string>

#include "mrp/corpus/vocabulary.h"
#include "mrp/errors.h"

namespace mrp::encoder {

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw InputError("model config: " + what);
  };
  if (vocab_size < corpus::Vocabulary::kNumSpecial) fail("vocab_size too small");
  if (d_model <= 0 || n_heads <= 0 || d_model % n_heads != 0) {
    fail("d_model must be a positive multiple of n_heads");
  }
  if (n_layers < 1) fail("n_layers must be >= 1");
  if (ff_dim < 1) fail("ff_dim must be >= 1");
  if (max_len < 3) fail("max_len must be >= 3");
  if (n_classes < 2 || n_rationale_classes != 2) fail("bad head sizes");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) fail("dropout in [0, 1)");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"vocab_size", vocab_size},   {"d_model", d_model},
          {"n_layers", n_layers},       {"n_heads", n_heads},
          {"ff_dim", ff_dim},           {"max_len", max_len},
          {"n_classes", n_classes},     {"n_rationale_classes", n_rationale_classes},
          {"dropout_rate", dropout_rate}, {"mlm_head", mlm_head}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.vocab_size = j.at("vocab_size").get<int>();
    c.d_model = j.at("d_model").get<int>();
    c.n_layers = j.at("n_layers").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.ff_dim = j.at("ff_dim").get<int>();
    c.max_len = j.at("max_len").get<int>();
    c.n_classes = j.at("n_classes").get<int>();
    c.n_rationale_classes = j.at("n_rationale_classes").get<int>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.mlm_head = j.at("mlm_head").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace mrp::encoder
