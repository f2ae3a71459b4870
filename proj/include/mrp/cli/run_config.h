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

#ifndef MRP_CLI_RUN_CONFIG_H_
#define MRP_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mrp/corpus/corpus.h"
#include "mrp/encoder/config.h"
#include "mrp/explain/explain.h"
#include "mrp/training/trainer.h"

namespace mrp::cli {

// Every tunable of a run, fully defaulted.
//
// File grammar, one setting per line:
//   key = value      # trailing comments and blank lines are ignored
// Keys are the dotted names listed by RunConfig::keys(); unknown keys and
// unparsable values are input errors. Later settings override earlier ones,
// so command-line --set overrides apply after the file.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_file(const std::string& path);
  void parse_text(std::string_view text, std::string_view origin = "config");
  // Accepts "key=value".
  void set_assignment(std::string_view assignment);
  void set(std::string_view key, std::string_view value);

  const std::string& get(std::string_view key) const;
  int get_int(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::uint64_t seed() const;

  static std::vector<std::string> keys();

  // Typed views.
  corpus::IngestOptions ingest_options() const;
  encoder::ModelConfig model_config(int vocab_size) const;
  training::TrainConfig train_config(training::Stage stage) const;
  explain::LimeOptions lime_options() const;
  std::vector<explain::Method> methods() const;

  // Output directory: output_dir if set, else $MRP_OUTPUT_DIR, else
  // "mrp_out".
  std::string output_dir() const;
  // Where ingest wrote examples.jsonl and vocab.json: data.encoded, else
  // the output directory.
  std::string encoded_dir() const;

  // {key: typed value}, in key order. Embedded in every artifact.
  nlohmann::json to_json() const;
  std::string to_text() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace mrp::cli

#endif  // MRP_CLI_RUN_CONFIG_H_
