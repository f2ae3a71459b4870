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

#include "mrp/cli/run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mrp/errors.h"

namespace mrp::cli {
namespace {

enum class Kind { kInt, kDouble, kString, kPath, kSeed };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* fallback;
};

// Order here is the serialization order.
constexpr KeySpec kKeys[] = {
    {"seed", Kind::kSeed, "1"},
    {"data.posts", Kind::kPath, ""},
    {"data.split", Kind::kPath, ""},
    {"data.encoded", Kind::kPath, ""},
    {"output_dir", Kind::kPath, ""},
    {"ingest.min_freq", Kind::kInt, "1"},
    {"ingest.max_len", Kind::kInt, "64"},
    {"ingest.group_rule", Kind::kString, "union"},
    {"model.d_model", Kind::kInt, "64"},
    {"model.n_layers", Kind::kInt, "2"},
    {"model.n_heads", Kind::kInt, "4"},
    {"model.ff_dim", Kind::kInt, "256"},
    {"model.dropout", Kind::kDouble, "0"},
    {"stage1.mask_ratio", Kind::kDouble, "0.5"},
    {"stage1.mlm_token_ratio", Kind::kDouble, "0.15"},
    {"stage1.lr", Kind::kDouble, "5e-05"},
    {"stage1.optimizer", Kind::kString, "adam"},
    {"stage1.epochs", Kind::kInt, "10"},
    {"stage1.batch_size", Kind::kInt, "32"},
    {"detect.lr", Kind::kDouble, "2e-05"},
    {"detect.optimizer", Kind::kString, "adam"},
    {"detect.epochs", Kind::kInt, "10"},
    {"detect.batch_size", Kind::kInt, "32"},
    {"detect.init_checkpoint", Kind::kPath, ""},
    {"eval.checkpoint", Kind::kPath, ""},
    {"eval.methods", Kind::kString, "attention,lime"},
    {"eval.top_k", Kind::kInt, "5"},
    {"eval.gmb_power", Kind::kDouble, "-5"},
    {"eval.threshold", Kind::kDouble, "0.5"},
    {"eval.iou_match", Kind::kDouble, "0.5"},
    {"eval.attention_heads", Kind::kString, "mean"},
    {"lime.n_samples", Kind::kInt, "500"},
    {"lime.kernel_width", Kind::kDouble, "0.25"},
    {"lime.ridge_lambda", Kind::kDouble, "1"},
};

const KeySpec& find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return k;
  }
  throw InputError("unknown config key '" + std::string(key) + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view v, T& out) {
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : kKeys) values_[k.key] = k.fallback;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  c.parse_text(ss.str(), path);
  return c;
}

void RunConfig::parse_text(std::string_view text, std::string_view origin) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    try {
      set_assignment(line);
    } catch (const InputError& e) {
      throw InputError(std::string(origin) + ":" + std::to_string(line_no) +
                       ": " + e.what());
    }
  }
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw InputError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec& k = find_key(key);
  auto bad = [&] {
    throw InputError("bad value '" + std::string(value) + "' for " +
                     std::string(key));
  };
  switch (k.kind) {
    case Kind::kInt: {
      int v;
      if (!parse_number(value, v)) bad();
      break;
    }
    case Kind::kSeed: {
      std::uint64_t v;
      if (!parse_number(value, v)) bad();
      break;
    }
    case Kind::kDouble: {
      double v;
      if (!parse_number(value, v)) bad();
      break;
    }
    case Kind::kString:
    case Kind::kPath:
      break;
  }
  const std::string v(value);
  if (key == "ingest.group_rule" && v != "union" && v != "majority") bad();
  if (key == "eval.attention_heads" && v != "mean" && v != "max") bad();
  if (key == "stage1.optimizer" || key == "detect.optimizer") {
    training::parse_optimizer(v);
  }
  if (key == "eval.methods") {
    for (const auto& m : split_list(v)) explain::parse_method(m);
  }
  values_[std::string(key)] = v;
}

const std::string& RunConfig::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
  return it->second;
}

int RunConfig::get_int(std::string_view key) const {
  int v = 0;
  parse_number(get(key), v);
  return v;
}

double RunConfig::get_double(std::string_view key) const {
  double v = 0;
  parse_number(get(key), v);
  return v;
}

std::uint64_t RunConfig::seed() const {
  std::uint64_t v = 0;
  parse_number(get("seed"), v);
  return v;
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& k : kKeys) out.emplace_back(k.key);
  return out;
}

corpus::IngestOptions RunConfig::ingest_options() const {
  corpus::IngestOptions o;
  o.min_freq = get_int("ingest.min_freq");
  o.max_len = get_int("ingest.max_len");
  o.group_rule = get("ingest.group_rule") == "majority"
                     ? corpus::GroupRule::kMajority
                     : corpus::GroupRule::kUnion;
  return o;
}

encoder::ModelConfig RunConfig::model_config(int vocab_size) const {
  encoder::ModelConfig c;
  c.vocab_size = vocab_size;
  c.d_model = get_int("model.d_model");
  c.n_layers = get_int("model.n_layers");
  c.n_heads = get_int("model.n_heads");
  c.ff_dim = get_int("model.ff_dim");
  c.max_len = get_int("ingest.max_len");
  c.dropout_rate = get_double("model.dropout");
  c.validate();
  return c;
}

training::TrainConfig RunConfig::train_config(training::Stage stage) const {
  training::TrainConfig c = training::TrainConfig::defaults(stage);
  const std::string p = stage == training::Stage::kDetect ? "detect." : "stage1.";
  c.lr = get_double(p + "lr");
  c.optimizer = training::parse_optimizer(get(p + "optimizer"));
  c.epochs = get_int(p + "epochs");
  c.batch_size = get_int(p + "batch_size");
  c.mask_ratio = get_double("stage1.mask_ratio");
  c.mlm_token_ratio = get_double("stage1.mlm_token_ratio");
  c.seed = seed();
  c.validate();
  return c;
}

explain::LimeOptions RunConfig::lime_options() const {
  explain::LimeOptions o;
  o.n_samples = get_int("lime.n_samples");
  o.kernel_width = get_double("lime.kernel_width");
  o.ridge_lambda = get_double("lime.ridge_lambda");
  return o;
}

std::vector<explain::Method> RunConfig::methods() const {
  std::vector<explain::Method> out;
  for (const auto& m : split_list(get("eval.methods"))) {
    out.push_back(explain::parse_method(m));
  }
  return out;
}

std::string RunConfig::output_dir() const {
  if (!get("output_dir").empty()) return get("output_dir");
  if (const char* env = std::getenv("MRP_OUTPUT_DIR"); env && *env) return env;
  return "mrp_out";
}

std::string RunConfig::encoded_dir() const {
  return get("data.encoded").empty() ? output_dir() : get("data.encoded");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : kKeys) {
    const std::string& v = values_.at(k.key);
    switch (k.kind) {
      case Kind::kInt: j[k.key] = get_int(k.key); break;
      case Kind::kSeed: j[k.key] = seed(); break;
      case Kind::kDouble: j[k.key] = get_double(k.key); break;
      default: j[k.key] = v;
    }
  }
  return j;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& k : kKeys) {
    out += k.key;
    out += " = ";
    out += values_.at(k.key);
    out += '\n';
  }
  return out;
}

}  // namespace mrp::cli
