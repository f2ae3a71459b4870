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

#ifndef MRP_ENCODER_CHECKPOINT_H_
#define MRP_ENCODER_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "mrp/encoder/config.h"
#include "mrp/encoder/model.h"

namespace mrp::encoder {

// On-disk layout:
//   "MRPCKPT1" <compact JSON header> '\n' <float32 LE arrays>
// The header carries config, stage, seed, epoch, metrics, run_config and
// the parameter manifest (name + shape, in EncoderModel::parameters()
// order). Arrays follow in manifest order with no padding.
inline constexpr char kCheckpointMagic[] = "MRPCKPT1";

struct CheckpointHeader {
  ModelConfig config;
  std::string stage;
  std::uint64_t seed = 0;
  int epoch = 0;
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json run_config = nlohmann::json::object();
};

struct Checkpoint {
  CheckpointHeader header;
  EncoderModel<float> model;
};

std::string serialize_checkpoint(const CheckpointHeader& header,
                                 const EncoderModel<float>& model);
// Throws InputError on a bad magic, malformed header, manifest that does not
// match the config, or truncated payload.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path,
                     const CheckpointHeader& header,
                     const EncoderModel<float>& model);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// The raw float payload (everything after the header line).
std::string checkpoint_payload(const std::string& bytes);

}  // namespace mrp::encoder

#endif  // MRP_ENCODER_CHECKPOINT_H_
