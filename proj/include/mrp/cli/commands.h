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

#ifndef MRP_CLI_COMMANDS_H_
#define MRP_CLI_COMMANDS_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrp/cli/run_config.h"
#include "mrp/explain/explain.h"
#include "mrp/training/trainer.h"

namespace mrp::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

// Runs fn(0..n-1) over `threads` workers (0 = hardware concurrency). Each
// index is handled exactly once, so callers writing into slot i get the
// same result for any thread count. The lowest-index exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// Each command writes its artifacts under config.output_dir() and a short
// human-readable summary to `out`. Errors are thrown (InputError,
// NumericError); run_cli maps them to exit codes.

// posts + split -> examples.jsonl, vocab.json, split_summary.json.
void cmd_ingest(const RunConfig& config, std::ostream& out);

// <stage>.ckpt and <stage>_log.json. Detection warm-starts from
// detect.init_checkpoint when set. Returns the checkpoint path.
std::string cmd_train(const RunConfig& config, training::Stage stage,
                      std::ostream& out, int threads = 0);

// report.json, report.csv and scores_<method>.jsonl for the test split,
// from eval.checkpoint (default <output_dir>/detect.ckpt).
void cmd_eval(const RunConfig& config, std::ostream& out, int threads = 0);

// Token table for one post on stdout, and explain_<id>_<method>.json.
void cmd_explain(const RunConfig& config, const std::string& post_id,
                 explain::Method method, std::ostream& out);

// mrp -> detect -> eval per ratio, each under sweep/ratio_<r>/, plus
// sweep_summary.json and sweep_summary.csv.
void cmd_sweep(const RunConfig& config, const std::vector<double>& ratios,
               std::ostream& out, int threads = 0);

// A generated corpus: posts.json and split.json. kind is "lexicon" or
// "context"; n_posts 0 keeps the generator default.
void cmd_synth(const RunConfig& config, const std::string& kind, int n_posts,
               std::ostream& out);

// Full command line (args[0] is the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mrp::cli

#endif  // MRP_CLI_COMMANDS_H_
