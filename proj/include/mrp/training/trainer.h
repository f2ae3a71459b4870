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

#ifndef MRP_TRAINING_TRAINER_H_
#define MRP_TRAINING_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mrp/corpus/types.h"
#include "mrp/encoder/model.h"
#include "mrp/training/optimizer.h"

namespace mrp::training {

enum class Stage { kMrp, kRp, kMlm, kDetect };

std::string stage_name(Stage stage);
// Throws InputError on an unknown name.
Stage parse_stage(std::string_view name);
bool is_pretraining(Stage stage);

struct TrainConfig {
  Stage stage = Stage::kMrp;
  double mask_ratio = 0.5;       // mrp only; rp always uses 1.0
  double mlm_token_ratio = 0.15;
  double lr = 5e-5;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  int epochs = 10;
  int batch_size = 32;
  std::uint64_t seed = 1;

  // Stage defaults: lr 5e-5 for pre-finetuning, 2e-5 for detection.
  static TrainConfig defaults(Stage stage);

  // The ratio the masking actually uses for this stage.
  double effective_mask_ratio() const;
  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;      // mean over the epoch's counted positions
  double accuracy = 0.0;  // token accuracy (stage 1) or example accuracy
  double lr = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
};

// A fresh stage-1 (or baseline detection) model. The MLM stage gets a token
// head. Weights come from Rng(seed), so mrp and rp runs start identical.
encoder::EncoderModel<float> init_model(encoder::ModelConfig config,
                                        Stage stage, std::uint64_t seed);

// Detection model warm-started from a stage-1 model: everything except the
// heads is copied bitwise and the class head is drawn fresh. Throws
// InputError when `init`'s shapes do not match `config`.
encoder::EncoderModel<float> init_detect_model(
    const encoder::ModelConfig& config,
    const encoder::EncoderModel<float>& init, std::uint64_t seed);

// Runs config.epochs epochs over `train` in mini-batches. Batch order is a
// function of (seed, epoch); mask plans of (seed, example id, epoch).
// Single-threaded, so a fixed seed gives bitwise identical weights.
TrainResult train_stage(encoder::EncoderModel<float>& model,
                        std::span<const corpus::Example> train,
                        const TrainConfig& config,
                        const std::function<void(const EpochLog&)>&
                            on_epoch = {});

struct MaskedEval {
  double loss = 0.0;
  double accuracy = 0.0;
  int count = 0;
};

// Held-out masked-rationale loss and token accuracy, with masks drawn from a
// stream reserved for evaluation. ratio 1.0 with feed_rationale = false is
// the rp evaluation.
MaskedEval evaluate_masked(encoder::EncoderModel<float>& model,
                           std::span<const corpus::Example> examples,
                           double ratio, std::uint64_t seed,
                           bool feed_rationale = true);

nlohmann::json training_log_json(const TrainConfig& config,
                                 const TrainResult& result);

}  // namespace mrp::training

#endif  // MRP_TRAINING_TRAINER_H_
