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

#include "mrp/encoder/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mrp/errors.h"

namespace mrp::encoder {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr std::size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

nlohmann::json manifest(const EncoderModel<float>& model) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto* p : model.parameters()) {
    out.push_back({{"name", p->name},
                   {"shape", {p->value.rows(), p->value.cols()}}});
  }
  return out;
}

std::size_t header_end(const std::string& bytes) {
  if (bytes.size() < kMagicLen ||
      bytes.compare(0, kMagicLen, kCheckpointMagic) != 0) {
    throw InputError("not a checkpoint (bad magic)");
  }
  const auto nl = bytes.find('\n', kMagicLen);
  if (nl == std::string::npos) throw InputError("checkpoint header truncated");
  return nl;
}

}  // namespace

std::string serialize_checkpoint(const CheckpointHeader& header,
                                 const EncoderModel<float>& model) {
  nlohmann::json h = {{"config", model.config().to_json()},
                      {"stage", header.stage},
                      {"seed", header.seed},
                      {"epoch", header.epoch},
                      {"metrics", header.metrics},
                      {"run_config", header.run_config},
                      {"params", manifest(model)}};
  std::string out(kCheckpointMagic);
  out += h.dump();
  out += '\n';
  for (const auto* p : model.parameters()) {
    const auto v = p->value.values();
    const auto* raw = reinterpret_cast<const char*>(v.data());
    out.append(raw, v.size() * sizeof(float));
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  const std::size_t nl = header_end(bytes);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.substr(kMagicLen, nl - kMagicLen));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint header: ") + e.what());
  }
  CheckpointHeader header;
  try {
    header.config = ModelConfig::from_json(h.at("config"));
    header.stage = h.at("stage").get<std::string>();
    header.seed = h.at("seed").get<std::uint64_t>();
    header.epoch = h.at("epoch").get<int>();
    header.metrics = h.at("metrics");
    header.run_config = h.at("run_config");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint header: ") + e.what());
  }
  Checkpoint ck{header, EncoderModel<float>(header.config)};
  if (h.at("params") != manifest(ck.model)) {
    throw InputError("checkpoint manifest does not match its config");
  }
  std::size_t offset = nl + 1;
  for (auto* p : ck.model.parameters()) {
    auto v = p->value.values();
    const std::size_t n = v.size() * sizeof(float);
    if (offset + n > bytes.size()) {
      throw InputError("checkpoint payload truncated at " + p->name);
    }
    std::memcpy(v.data(), bytes.data() + offset, n);
    offset += n;
    p->zero_grad();
  }
  if (offset != bytes.size()) {
    throw InputError("checkpoint has trailing bytes");
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path,
                     const CheckpointHeader& header,
                     const EncoderModel<float>& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  const std::string bytes = serialize_checkpoint(header, model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

std::string checkpoint_payload(const std::string& bytes) {
  return bytes.substr(header_end(bytes) + 1);
}

}  // namespace mrp::encoder
