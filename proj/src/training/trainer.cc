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

#include "mrp/training/trainer.h"

#include <numeric>

#include "mrp/errors.h"
#include "mrp/training/mask.h"
#include "mrp/training/steps.h"

namespace mrp::training {

using encoder::EncoderModel;
using encoder::ModelConfig;
using numcore::Rng;

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::kMrp: return "mrp";
    case Stage::kRp: return "rp";
    case Stage::kMlm: return "mlm";
    case Stage::kDetect: return "detect";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::kMrp, Stage::kRp, Stage::kMlm, Stage::kDetect}) {
    if (name == stage_name(s)) return s;
  }
  throw InputError("unknown stage '" + std::string(name) +
                   "' (expected mrp, rp, mlm or detect)");
}

bool is_pretraining(Stage stage) { return stage != Stage::kDetect; }

TrainConfig TrainConfig::defaults(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  c.lr = stage == Stage::kDetect ? 2e-5 : 5e-5;
  return c;
}

double TrainConfig::effective_mask_ratio() const {
  switch (stage) {
    case Stage::kMrp: return mask_ratio;
    case Stage::kRp: return 1.0;
    case Stage::kMlm: return mlm_token_ratio;
    case Stage::kDetect: return 0.0;
  }
  return 0.0;
}

void TrainConfig::validate() const {
  if (!(mask_ratio > 0.0 && mask_ratio <= 1.0)) {
    throw InputError("mask_ratio must be in (0, 1]");
  }
  if (!(mlm_token_ratio > 0.0 && mlm_token_ratio <= 1.0)) {
    throw InputError("mlm_token_ratio must be in (0, 1]");
  }
  if (!(lr >= 0.0)) throw InputError("lr must be >= 0");
  if (epochs < 0) throw InputError("epochs must be >= 0");
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"stage", stage_name(stage)},
          {"mask_ratio", mask_ratio},
          {"mlm_token_ratio", mlm_token_ratio},
          {"lr", lr},
          {"optimizer", optimizer_name(optimizer)},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.stage = parse_stage(j.at("stage").get<std::string>());
    c.mask_ratio = j.at("mask_ratio").get<double>();
    c.mlm_token_ratio = j.at("mlm_token_ratio").get<double>();
    c.lr = j.at("lr").get<double>();
    c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed train config: ") + e.what());
  }
  c.validate();
  return c;
}

EncoderModel<float> init_model(ModelConfig config, Stage stage,
                               std::uint64_t seed) {
  config.mlm_head = stage == Stage::kMlm;
  EncoderModel<float> m(config);
  m.initialize(Rng(seed));
  return m;
}

EncoderModel<float> init_detect_model(const ModelConfig& config,
                                      const EncoderModel<float>& init,
                                      std::uint64_t seed) {
  ModelConfig a = config;
  ModelConfig b = init.config();
  a.mlm_head = b.mlm_head = false;
  a.dropout_rate = b.dropout_rate = 0.0;
  if (!(a == b)) {
    throw InputError("init checkpoint config " + b.to_json().dump() +
                     " does not match model config " + a.to_json().dump());
  }
  ModelConfig out_config = config;
  out_config.mlm_head = false;
  EncoderModel<float> m(out_config);
  m.initialize(Rng(seed));
  auto& src = const_cast<EncoderModel<float>&>(init);
  for (auto* p : m.parameters()) {
    if (p->name.starts_with("class_head.")) continue;
    const auto* q = src.find(p->name);
    if (q == nullptr || !q->value.same_shape(p->value)) {
      throw InputError("init checkpoint lacks parameter " + p->name);
    }
    p->value = q->value;
  }
  m.reinitialize_class_head(Rng(seed).derive("detect"));
  return m;
}

namespace {

std::vector<int> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(seed).derive("shuffle").derive(static_cast<std::uint64_t>(epoch));
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

TrainResult train_stage(EncoderModel<float>& model,
                        std::span<const corpus::Example> train,
                        const TrainConfig& config,
                        const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (train.empty()) throw InputError("empty training split");
  if (config.stage == Stage::kMlm && !model.config().mlm_head) {
    throw InputError("mlm stage needs a model with a token head");
  }
  auto params = model.parameters();
  Optimizer<float> opt({config.optimizer, config.lr}, params);
  const bool dropout = model.config().dropout_rate > 0.0;
  const double ratio = config.effective_mask_ratio();
  const char* mask_stream = config.stage == Stage::kMlm ? "mlm" : "mask";

  TrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(train.size(), config.seed, epoch);
    double loss_sum = 0.0;
    long hits = 0, count = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<const corpus::Example*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train[order[i]]);
      Rng drop = Rng(config.seed).derive("dropout").derive(
          static_cast<std::uint64_t>(epoch)).derive(start);
      Rng* drop_rng = dropout ? &drop : nullptr;

      StepResult r;
      if (config.stage == Stage::kDetect) {
        r = detect_step(model, batch, drop_rng);
      } else if (config.stage == Stage::kRp) {
        r = rp_step(model, batch, drop_rng);
      } else {
        std::vector<MaskPlan> plans;
        for (const auto* ex : batch) {
          Rng mr = mask_rng(config.seed, mask_stream, ex->id, epoch);
          plans.push_back(sample_mask(*ex, ratio, mr));
        }
        r = config.stage == Stage::kMlm ? mlm_step(model, batch, plans, drop_rng)
                                        : mrp_step(model, batch, plans, drop_rng);
      }
      opt.step();
      loss_sum += r.loss * r.count;
      hits += r.correct;
      count += r.count;
    }
    EpochLog log{epoch + 1, loss_sum / count,
                 static_cast<double>(hits) / count, config.lr};
    result.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

MaskedEval evaluate_masked(EncoderModel<float>& model,
                           std::span<const corpus::Example> examples,
                           double ratio, std::uint64_t seed,
                           bool feed_rationale) {
  MaskedEval out;
  double loss_sum = 0.0;
  long hits = 0;
  for (const auto& ex : examples) {
    Rng mr = mask_rng(seed, "eval", ex.id, 0);
    const MaskPlan plan = sample_mask(ex, ratio, mr);
    std::vector<std::uint8_t> mask(ex.attention_len, 0);
    for (int p : plan.positions) mask[p] = 1;
    const std::vector<int> targets(ex.gold_rationale.begin(),
                                   ex.gold_rationale.begin() + ex.attention_len);
    const auto inputs = feed_rationale
                            ? mrp_input(ex, plan)
                            : std::vector<encoder::RationaleInput>{};
    const auto r = rationale_loss(
        model, std::span<const int>(ex.token_ids).first(ex.attention_len),
        inputs, targets, mask, 0.0);
    loss_sum += r.loss * r.count;
    hits += r.correct;
    out.count += r.count;
  }
  if (out.count == 0) throw InputError("no examples to evaluate");
  out.loss = loss_sum / out.count;
  out.accuracy = static_cast<double>(hits) / out.count;
  return out;
}

nlohmann::json training_log_json(const TrainConfig& config,
                                 const TrainResult& result) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : result.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"loss", e.loss},
                      {"accuracy", e.accuracy},
                      {"lr", e.lr}});
  }
  return {{"stage", stage_name(config.stage)},
          {"seed", config.seed},
          {"config", config.to_json()},
          {"epochs", epochs}};
}

}  // namespace mrp::training
