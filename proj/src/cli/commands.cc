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

#include "mrp/cli/commands.h"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mrp/corpus/corpus.h"
#include "mrp/corpus/synthetic.h"
#include "mrp/encoder/checkpoint.h"
#include "mrp/encoder/classifier.h"
#include "mrp/errors.h"
#include "mrp/metrics/metrics.h"
#include "mrp/metrics/report.h"
#include "mrp/numcore/rng.h"

namespace mrp::cli {
namespace {

namespace fs = std::filesystem;
using corpus::Example;
using nlohmann::json;
using training::Stage;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string ratio_tag(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

struct Encoded {
  corpus::Vocabulary vocab;
  corpus::Splits splits;
};

Encoded load_encoded(const RunConfig& config) {
  const fs::path dir = config.encoded_dir();
  std::ifstream in(dir / "examples.jsonl");
  if (!in) {
    throw InputError("no examples.jsonl in " + dir.string() +
                     " (run ingest first)");
  }
  Encoded e;
  e.splits = corpus::read_examples_jsonl(in);
  e.vocab = corpus::Vocabulary::from_json(
      corpus::read_json_file((dir / "vocab.json").string()));
  return e;
}

std::string default_checkpoint(const RunConfig& config) {
  if (!config.get("eval.checkpoint").empty()) {
    return config.get("eval.checkpoint");
  }
  return (fs::path(config.output_dir()) / "detect.ckpt").string();
}

encoder::Checkpoint load_checked(const std::string& path) {
  if (!fs::exists(path)) throw InputError("missing checkpoint " + path);
  return encoder::load_checkpoint(path);
}

json checkpoint_info(const std::string& path,
                     const encoder::CheckpointHeader& h) {
  return {{"file", fs::path(path).filename().string()},
          {"stage", h.stage},
          {"seed", h.seed},
          {"epoch", h.epoch},
          {"metrics", h.metrics},
          {"run_config", h.run_config}};
}

std::vector<metrics::PredictionRecord> predict(
    const encoder::Classifier& clf, const std::vector<Example>& examples,
    int threads) {
  std::vector<metrics::PredictionRecord> records(examples.size());
  parallel_for(static_cast<int>(examples.size()), threads, [&](int i) {
    const Example& ex = examples[i];
    auto& r = records[i];
    r.id = ex.id;
    r.gold = ex.label;
    r.probs = clf.class_probs(ex.token_ids, ex.attention_len);
    r.predicted = encoder::argmax(r.probs);
    r.target_groups = ex.target_groups;
  });
  return records;
}

explain::TokenScores explain_one(const encoder::EncoderModel<float>& model,
                                 const RunConfig& config,
                                 const Example& ex, explain::Method method) {
  if (method == explain::Method::kAttention) {
    return explain::attention_scores(model, ex,
                                     config.get("eval.attention_heads") == "max");
  }
  const encoder::EncoderClassifier clf(model);
  numcore::Rng rng = numcore::Rng(config.seed()).derive("lime").derive(ex.id);
  return explain::lime_scores(clf, ex, config.lime_options(), rng);
}

json split_counts(const std::vector<Example>& list) {
  json classes = json::object();
  for (int c = 0; c < corpus::kNumClasses; ++c) {
    classes[std::string(corpus::label_name(static_cast<corpus::Label>(c)))] = 0;
  }
  json groups = json::object();
  for (auto g : corpus::kTargetGroups) groups[std::string(g)] = 0;
  for (const auto& ex : list) {
    classes[std::string(corpus::label_name(ex.label))] =
        classes[std::string(corpus::label_name(ex.label))].get<int>() + 1;
    for (const auto& g : ex.target_groups) {
      groups[g] = groups.value(g, 0) + 1;
    }
  }
  return {{"count", list.size()}, {"classes", classes}, {"groups", groups}};
}

}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](int t) {
    for (int i = t; i < n; i += threads) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void cmd_ingest(const RunConfig& config, std::ostream& out) {
  if (config.get("data.posts").empty() || config.get("data.split").empty()) {
    throw InputError("ingest needs data.posts and data.split");
  }
  const auto posts = corpus::load_posts(config.get("data.posts"));
  const auto partition = corpus::load_partition(config.get("data.split"));
  const auto result = corpus::ingest(posts, partition, config.ingest_options());

  const fs::path dir = config.output_dir();
  const json run_config = config.to_json();

  std::ostringstream examples;
  examples << json{{"provenance", {{"run_config", run_config}}}}.dump() << '\n';
  corpus::write_examples_jsonl(examples, result.splits);
  write_text(dir / "examples.jsonl", examples.str());

  json vocab = result.vocab.to_json();
  vocab["run_config"] = run_config;
  write_text(dir / "vocab.json", pretty(vocab));

  json exclusions = json::array();
  for (const auto& e : result.exclusions) {
    exclusions.push_back({{"post_id", e.post_id}, {"reason", e.reason}});
  }
  const json summary = {
      {"splits",
       {{"train", split_counts(result.splits.train)},
        {"val", split_counts(result.splits.val)},
        {"test", split_counts(result.splits.test)}}},
      {"vocab_size", result.vocab.size()},
      {"exclusions", exclusions},
      {"run_config", run_config}};
  write_text(dir / "split_summary.json", pretty(summary));

  out << "posts " << posts.size() << ", excluded " << result.exclusions.size()
      << ", vocab " << result.vocab.size() << "\n";
  out << "split  normal offensive hatespeech\n";
  for (const char* name : {"train", "val", "test"}) {
    const auto& c = summary["splits"][name]["classes"];
    out << name << "  " << c["normal"].get<int>() << " "
        << c["offensive"].get<int>() << " " << c["hatespeech"].get<int>()
        << "\n";
  }
  out << "groups (all splits):";
  for (auto g : corpus::kTargetGroups) {
    int n = 0;
    for (const char* name : {"train", "val", "test"}) {
      n += summary["splits"][name]["groups"][std::string(g)].get<int>();
    }
    out << " " << g << "=" << n;
  }
  out << "\n";
  for (const auto& e : result.exclusions) {
    out << "excluded " << e.post_id << ": " << e.reason << "\n";
  }
}

std::string cmd_train(const RunConfig& config, Stage stage, std::ostream& out,
                      int threads) {
  const Encoded data = load_encoded(config);
  const auto train_cfg = config.train_config(stage);
  train_cfg.validate();
  const auto model_cfg = config.model_config(data.vocab.size());
  if (data.splits.train.empty()) throw InputError("empty train split");

  encoder::EncoderModel<float> model = [&] {
    if (stage == Stage::kDetect && !config.get("detect.init_checkpoint").empty()) {
      const auto init = load_checked(config.get("detect.init_checkpoint"));
      if (!training::is_pretraining(training::parse_stage(init.header.stage))) {
        throw InputError("init checkpoint is a " + init.header.stage +
                         " checkpoint, not a stage-1 one");
      }
      return training::init_detect_model(model_cfg, init.model, config.seed());
    }
    return training::init_model(model_cfg, stage, config.seed());
  }();

  const std::string name = training::stage_name(stage);
  out << "train " << name << ": " << data.splits.train.size()
      << " examples, " << train_cfg.epochs << " epochs\n";
  const auto result = training::train_stage(
      model, data.splits.train, train_cfg, [&](const training::EpochLog& e) {
        out << "epoch " << e.epoch << " loss " << fixed(e.loss, 6) << " acc "
            << fixed(e.accuracy) << "\n";
      });

  json metrics = json::object();
  if (!result.epochs.empty()) {
    metrics["train_loss"] = result.epochs.back().loss;
    metrics["train_accuracy"] = result.epochs.back().accuracy;
  }
  if (stage == Stage::kMrp || stage == Stage::kRp) {
    const auto ev = training::evaluate_masked(
        model, data.splits.val, train_cfg.effective_mask_ratio(), config.seed());
    metrics["val_masked_loss"] = ev.loss;
    metrics["val_masked_accuracy"] = ev.accuracy;
    metrics["val_masked_count"] = ev.count;
    out << "val masked loss " << fixed(ev.loss, 6) << " acc "
        << fixed(ev.accuracy) << "\n";
  } else if (stage == Stage::kDetect && !data.splits.val.empty()) {
    const encoder::EncoderClassifier clf(model);
    const auto records = predict(clf, data.splits.val, threads);
    const auto perf = metrics::performance(records);
    metrics["val_accuracy"] = perf.accuracy;
    metrics["val_macro_f1"] = perf.macro_f1;
    out << "val accuracy " << fixed(perf.accuracy) << " macro-F1 "
        << fixed(perf.macro_f1) << "\n";
  }

  encoder::CheckpointHeader header;
  header.config = model.config();
  header.stage = name;
  header.seed = config.seed();
  header.epoch = train_cfg.epochs;
  header.metrics = metrics;
  header.run_config = config.to_json();

  const fs::path dir = config.output_dir();
  const fs::path ckpt = dir / (name + ".ckpt");
  fs::create_directories(dir);
  encoder::save_checkpoint(ckpt, header, model);

  json log = training::training_log_json(train_cfg, result);
  log["metrics"] = metrics;
  log["run_config"] = header.run_config;
  write_text(dir / (name + "_log.json"), pretty(log));
  out << "wrote " << ckpt.string() << "\n";
  return ckpt.string();
}

void cmd_eval(const RunConfig& config, std::ostream& out, int threads) {
  const Encoded data = load_encoded(config);
  const std::string path = default_checkpoint(config);
  const auto ckpt = load_checked(path);
  if (ckpt.model.config().vocab_size != data.vocab.size()) {
    throw InputError("checkpoint vocabulary does not match vocab.json");
  }
  const auto& test = data.splits.test;
  if (test.empty()) throw InputError("empty test split");

  const encoder::EncoderClassifier clf(ckpt.model);
  const auto records = predict(clf, test, threads);

  const json run_config = config.to_json();
  const json ckpt_json = checkpoint_info(path, ckpt.header);
  const fs::path dir = config.output_dir();

  std::vector<std::vector<std::uint8_t>> gold;
  gold.reserve(test.size());
  for (const auto& ex : test) gold.push_back(ex.word_rationale());

  std::vector<metrics::MethodReport> methods;
  for (const auto method : config.methods()) {
    std::vector<explain::TokenScores> scores(test.size());
    parallel_for(static_cast<int>(test.size()), threads, [&](int i) {
      scores[i] = explain_one(ckpt.model, config, test[i], method);
    });
    std::vector<std::vector<double>> flat;
    flat.reserve(scores.size());
    std::ostringstream dump;
    dump << json{{"provenance",
                  {{"run_config", run_config}, {"checkpoint", ckpt_json}}}}
                .dump()
         << '\n';
    for (std::size_t i = 0; i < test.size(); ++i) {
      flat.push_back(scores[i].scores);
      dump << explain::score_dump_json(test[i], scores[i]).dump() << '\n';
    }
    const std::string name = explain::method_name(method);
    write_text(dir / ("scores_" + name + ".jsonl"), dump.str());

    metrics::MethodReport m;
    m.method = name;
    m.plausibility = metrics::plausibility(gold, flat,
                                           config.get_double("eval.threshold"),
                                           config.get_double("eval.iou_match"));
    m.faithfulness = metrics::faithfulness(clf, test, flat,
                                           config.get_int("eval.top_k"));
    methods.push_back(std::move(m));
  }

  const auto report = metrics::build_report(records, std::move(methods),
                                            config.get_double("eval.gmb_power"));
  json j = report.to_json();
  j["checkpoint"] = ckpt_json;
  j["run_config"] = run_config;
  write_text(dir / "report.json", pretty(j));
  write_text(dir / "report.csv",
             report.to_csv(fs::path(path).stem().string()));

  out << "test " << test.size() << ": accuracy "
      << fixed(report.performance.accuracy) << " macro-F1 "
      << fixed(report.performance.macro_f1);
  if (report.performance.auroc) {
    out << " AUROC " << fixed(*report.performance.auroc);
  }
  out << "\n";
  for (const auto& m : report.methods) {
    out << m.method << ": IOU-F1 " << fixed(m.plausibility.iou_f1)
        << " token-F1 " << fixed(m.plausibility.token_f1) << " AUPRC "
        << fixed(m.plausibility.auprc) << " comp "
        << fixed(m.faithfulness.comprehensiveness) << " suff "
        << fixed(m.faithfulness.sufficiency) << "\n";
  }
  out << "wrote " << (dir / "report.json").string() << "\n";
}

void cmd_explain(const RunConfig& config, const std::string& post_id,
                 explain::Method method, std::ostream& out) {
  const Encoded data = load_encoded(config);
  const Example* ex = nullptr;
  for (const auto* list :
       {&data.splits.train, &data.splits.val, &data.splits.test}) {
    for (const auto& e : *list) {
      if (e.id == post_id) ex = &e;
    }
  }
  if (ex == nullptr) throw InputError("unknown post id '" + post_id + "'");

  const std::string path = default_checkpoint(config);
  const auto ckpt = load_checked(path);
  const auto scores = explain_one(ckpt.model, config, *ex, method);
  const auto human = ex->word_rationale();

  const auto predicted = static_cast<corpus::Label>(scores.predicted_class);
  out << "post " << ex->id << "  gold " << corpus::label_name(ex->label)
      << "  predicted " << corpus::label_name(predicted) << " (p "
      << fixed(scores.class_probs[scores.predicted_class]) << ")  method "
      << explain::method_name(method) << "\n";
  std::size_t width = 5;
  for (const auto& w : ex->words) width = std::max(width, w.size());
  auto pad = [&](const std::string& s) {
    return s + std::string(width + 2 - s.size(), ' ');
  };
  out << pad("token") << "human  score\n";
  for (std::size_t i = 0; i < ex->words.size(); ++i) {
    out << pad(ex->words[i]) << static_cast<int>(human[i]) << "      "
        << fixed(scores.scores[i]) << "\n";
  }

  json j = explain::score_dump_json(*ex, scores);
  j["human_rationale"] = human;
  j["gold_label"] = std::string(corpus::label_name(ex->label));
  j["checkpoint"] = checkpoint_info(path, ckpt.header);
  j["run_config"] = config.to_json();
  const fs::path file = fs::path(config.output_dir()) /
                        ("explain_" + ex->id + "_" +
                         explain::method_name(method) + ".json");
  write_text(file, pretty(j));
  out << "wrote " << file.string() << "\n";
}

void cmd_sweep(const RunConfig& config, const std::vector<double>& ratios,
               std::ostream& out, int threads) {
  if (ratios.empty()) throw InputError("sweep needs at least one ratio");
  const fs::path root = config.output_dir();
  json rows = json::array();
  std::string csv = "ratio,val_masked_loss,val_masked_accuracy,accuracy,"
                    "macro_f1\n";
  for (const double r : ratios) {
    RunConfig run = config;
    run.set("data.encoded", config.encoded_dir());
    run.set("stage1.mask_ratio", ratio_tag(r));
    const fs::path dir = root / "sweep" / ("ratio_" + ratio_tag(r));
    run.set("output_dir", dir.string());
    out << "== ratio " << ratio_tag(r) << "\n";
    const std::string mrp = cmd_train(run, Stage::kMrp, out, threads);
    run.set("detect.init_checkpoint", mrp);
    const std::string detect = cmd_train(run, Stage::kDetect, out, threads);
    run.set("eval.checkpoint", detect);
    cmd_eval(run, out, threads);

    const auto stage1 = encoder::load_checkpoint(mrp).header.metrics;
    const auto report = corpus::read_json_file((dir / "report.json").string());
    const json row = {
        {"ratio", r},
        {"dir", dir.string()},
        {"val_masked_loss", stage1.at("val_masked_loss")},
        {"val_masked_accuracy", stage1.at("val_masked_accuracy")},
        {"accuracy", report["performance"]["accuracy"]},
        {"macro_f1", report["performance"]["macro_f1"]}};
    rows.push_back(row);
    char line[256];
    std::snprintf(line, sizeof line, "%g,%.17g,%.17g,%.17g,%.17g\n", r,
                  row["val_masked_loss"].get<double>(),
                  row["val_masked_accuracy"].get<double>(),
                  row["accuracy"].get<double>(), row["macro_f1"].get<double>());
    csv += line;
  }
  write_text(root / "sweep_summary.json",
             pretty({{"runs", rows}, {"run_config", config.to_json()}}));
  write_text(root / "sweep_summary.csv", csv);
  out << "wrote " << (root / "sweep_summary.json").string() << "\n";
}

void cmd_synth(const RunConfig& config, const std::string& kind, int n_posts,
               std::ostream& out) {
  corpus::SyntheticCorpus c;
  if (kind == "lexicon") {
    corpus::LexiconCorpusOptions o;
    o.seed = config.seed();
    if (n_posts > 0) o.n_posts = n_posts;
    c = corpus::make_lexicon_corpus(o);
  } else if (kind == "context") {
    corpus::ContextCorpusOptions o;
    o.seed = config.seed();
    if (n_posts > 0) o.n_posts = n_posts;
    c = corpus::make_context_corpus(o);
  } else {
    throw InputError("unknown synthetic corpus kind '" + kind + "'");
  }
  const fs::path dir = config.output_dir();
  write_text(dir / "posts.json", corpus::posts_to_json(c.posts).dump() + "\n");
  write_text(dir / "split.json",
             pretty(corpus::partition_to_json(c.partition)));
  out << "wrote " << c.posts.size() << " " << kind << " posts to "
      << dir.string() << "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Masked rationale prediction and hate speech detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::string seed;
  int threads = 0;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--set", overrides, "override a config key (key=value)");
  app.add_option("--output-dir", output_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads,
                 "worker threads for evaluation (0 = all cores)");

  auto* ingest = app.add_subcommand("ingest", "encode posts and split");
  std::string posts, split;
  ingest->add_option("--posts", posts, "HateXplain-format posts JSON");
  ingest->add_option("--split", split, "split JSON");

  auto* train = app.add_subcommand("train", "train one stage");
  std::string stage, init;
  std::string ratio;
  train->add_option("--stage", stage, "mrp, rp, mlm or detect")->required();
  train->add_option("--init", init, "stage-1 checkpoint (detect)");
  train->add_option("--ratio", ratio, "mask ratio (mrp)");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string checkpoint, methods;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file");
  eval->add_option("--methods", methods, "comma-separated explanation methods");

  auto* explain_cmd = app.add_subcommand("explain", "explain one post");
  std::string method, id;
  explain_cmd->add_option("--method", method, "attention or lime")->required();
  explain_cmd->add_option("--id", id, "post id")->required();
  explain_cmd->add_option("--checkpoint", checkpoint, "checkpoint file");

  auto* sweep = app.add_subcommand("sweep", "mask-ratio sweep");
  std::vector<double> ratios;
  sweep->add_option("--ratios", ratios, "ratios, comma separated")
      ->required()
      ->delimiter(',');

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  std::string kind = "lexicon";
  int n_posts = 0;
  synth->add_option("--kind", kind, "lexicon or context");
  synth->add_option("--posts", n_posts, "number of posts");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = RunConfig::from_file(config_path);
    for (const auto& s : overrides) config.set_assignment(s);
    if (!output_dir.empty()) config.set("output_dir", output_dir);
    if (!seed.empty()) config.set("seed", seed);
    if (!posts.empty()) config.set("data.posts", posts);
    if (!split.empty()) config.set("data.split", split);
    if (!init.empty()) config.set("detect.init_checkpoint", init);
    if (!ratio.empty()) config.set("stage1.mask_ratio", ratio);
    if (!checkpoint.empty()) config.set("eval.checkpoint", checkpoint);
    if (!methods.empty()) config.set("eval.methods", methods);

    if (ingest->parsed()) {
      cmd_ingest(config, out);
    } else if (train->parsed()) {
      cmd_train(config, training::parse_stage(stage), out, threads);
    } else if (eval->parsed()) {
      cmd_eval(config, out, threads);
    } else if (explain_cmd->parsed()) {
      cmd_explain(config, id, explain::parse_method(method), out);
    } else if (sweep->parsed()) {
      cmd_sweep(config, ratios, out, threads);
    } else if (synth->parsed()) {
      cmd_synth(config, kind, n_posts, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace mrp::cli
