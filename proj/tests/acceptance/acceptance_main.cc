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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mrp/cli/commands.h"
#include "mrp/corpus/corpus.h"
#include "mrp/corpus/synthetic.h"
#include "mrp/encoder/checkpoint.h"
#include "mrp/encoder/classifier.h"
#include "mrp/explain/explain.h"
#include "mrp/metrics/metrics.h"
#include "mrp/numcore/grad_check.h"
#include "mrp/training/mask.h"
#include "mrp/training/steps.h"
#include "mrp/training/trainer.h"
#include "testing/bias_fixture.h"
#include "testing/metric_oracles.h"
#include "testing/planted.h"

namespace mrp {
namespace {

namespace fs = std::filesystem;
using corpus::Example;
using corpus::Label;
using corpus::Vocabulary;
using encoder::EncoderModel;
using encoder::ModelConfig;
using encoder::RationaleInput;
using numcore::Rng;
using training::Stage;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Example Sequence(const std::string& id, std::vector<int> words,
                 std::vector<std::uint8_t> bits, Label label, int max_len) {
  return testing::WordExample(id, std::move(words), std::move(bits), label,
                              max_len);
}

ModelConfig SmallModel(int vocab, int d, int layers, int heads, int ff,
                       int max_len) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.d_model = d;
  c.n_layers = layers;
  c.n_heads = heads;
  c.ff_dim = ff;
  c.max_len = max_len;
  return c;
}

// ---- 1: gradients ----

Outcome GradientSoundness() {
  const ModelConfig cfg = SmallModel(24, 8, 1, 2, 16, 8);
  Rng data(11);
  std::vector<Example> exs;
  for (int e = 0; e < 3; ++e) {
    std::vector<int> words;
    std::vector<std::uint8_t> bits;
    for (int i = 0; i < 6; ++i) {
      words.push_back(Vocabulary::kNumSpecial +
                      static_cast<int>(data.uniform_int(19)));
      bits.push_back(data.uniform() < 0.4);
    }
    exs.push_back(Sequence("g" + std::to_string(e), words, bits,
                           static_cast<Label>(e % 3), 8));
  }
  std::vector<const Example*> batch;
  for (const auto& e : exs) batch.push_back(&e);
  std::vector<training::MaskPlan> plans;
  for (const auto& e : exs) {
    Rng r = training::mask_rng(3, "gradcheck", e.id, 0);
    plans.push_back(training::sample_mask(e, 0.5, r));
  }

  numcore::GradCheckOptions o;
  o.eps = 1e-5;
  o.denominator_floor = 1e-6;
  o.samples_per_param = 100;

  double worst = 0;
  int coords = 0, min_coords = 1 << 30, params = 0;
  bool ok = true;
  for (const char* path : {"rationale", "class"}) {
    EncoderModel<double> m(cfg);
    m.initialize(Rng(7));
    auto ps = m.parameters();
    Rng rng(path[0]);
    const auto report = numcore::grad_check<double>(
        [&] {
          return path[0] == 'r' ? training::mrp_step(m, batch, plans).loss
                                : training::detect_step(m, batch).loss;
        },
        ps, rng, o);
    worst = std::max(worst, report.max_rel_error);
    coords += report.coords_checked;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const int size = static_cast<int>(ps[i]->value.values().size());
      const int got = report.per_param[i].coords;
      // Every tensor gets 100 coordinates, or all of them when smaller.
      if (got < std::min(100, size)) ok = false;
      min_coords = std::min(min_coords, got);
    }
    params = static_cast<int>(ps.size());
  }
  ok = ok && worst < 1e-4;
  return {ok, "max rel err " + fmt("%.2e", worst) + " over " +
                  std::to_string(coords) + " coords, " +
                  std::to_string(params) + " tensors per path, min " +
                  std::to_string(min_coords) + " per tensor"};
}

// ---- 2: metric oracles ----

Outcome MetricOracles() {
  Rng rng(2024);
  int auc_mismatch = 0, auc_checked = 0;
  double gmb_err = 0, iou_err = 0, tok_err = 0, ap_err = 0, bias_err = 0;
  for (int f = 0; f < 50; ++f) {
    const int n = 2 + static_cast<int>(rng.uniform_int(19));
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    std::vector<metrics::PredictionRecord> recs;
    for (int i = 0; i < n; ++i) {
      // Coarse grid so ties occur.
      s.push_back(std::round(rng.uniform() * 8) / 8);
      y.push_back(rng.uniform() < 0.5);
      std::vector<std::string> groups;
      if (rng.uniform() < 0.4) groups.push_back("Women");
      recs.push_back(
          testing::ToxicRecord("r" + std::to_string(i), y.back(), groups,
                               s.back()));
    }
    const auto got = metrics::auc(s, y);
    const auto want = testing::PairCountAuc(s, y);
    ++auc_checked;
    if (got.has_value() != want.has_value() || (got && *got != *want)) {
      ++auc_mismatch;
    }

    // Bias AUCs against pair counting on the explicit subsets.
    const auto b = metrics::bias_aucs(recs, "Women");
    auto subset_auc = [&](auto keep) {
      std::vector<double> ss;
      std::vector<std::uint8_t> yy;
      for (const auto& r : recs) {
        if (keep(r)) {
          ss.push_back(r.toxic_score());
          yy.push_back(r.gold_toxic());
        }
      }
      return testing::PairCountAuc(ss, yy);
    };
    const auto in = [](const metrics::PredictionRecord& r) {
      return r.in_group("Women");
    };
    const std::optional<double> want_b[3] = {
        subset_auc(in),
        subset_auc([&](const auto& r) { return in(r) != r.gold_toxic(); }),
        subset_auc([&](const auto& r) { return in(r) == r.gold_toxic(); })};
    const std::optional<double> got_b[3] = {b.subgroup, b.bpsn, b.bnsp};
    for (int k = 0; k < 3; ++k) {
      if (got_b[k].has_value() != want_b[k].has_value()) {
        bias_err = 1;
      } else if (got_b[k]) {
        bias_err = std::max(bias_err, std::abs(*got_b[k] - *want_b[k]));
      }
    }

    std::vector<double> vals;
    const int g = 1 + static_cast<int>(rng.uniform_int(10));
    for (int i = 0; i < g; ++i) vals.push_back(0.05 + 0.95 * rng.uniform());
    for (double p : {-5.0, -2.0, 1.0, 3.0}) {
      gmb_err = std::max(
          gmb_err, std::abs(metrics::gmb(vals, p) - testing::DirectPowerMean(vals, p)));
    }

    std::vector<std::vector<std::uint8_t>> gold;
    std::vector<std::vector<double>> scores;
    for (int i = 0; i < n; ++i) {
      const int len = 1 + static_cast<int>(rng.uniform_int(12));
      std::vector<std::uint8_t> gb;
      std::vector<double> sc;
      for (int t = 0; t < len; ++t) {
        gb.push_back(rng.uniform() < 0.35);
        sc.push_back(std::round(rng.uniform() * 10) / 10);
      }
      gold.push_back(gb);
      scores.push_back(sc);
    }
    const auto pg = metrics::plausibility(gold, scores, 0.5, 0.5);
    const auto po = testing::Plausible(gold, scores, 0.5, 0.5);
    iou_err = std::max(iou_err, std::abs(pg.iou_f1 - po.iou_f1));
    tok_err = std::max(tok_err, std::abs(pg.token_f1 - po.token_f1));
    ap_err = std::max(ap_err, std::abs(pg.auprc - po.auprc));
  }
  const bool ok = auc_mismatch == 0 && bias_err <= 1e-12 && gmb_err <= 1e-9 &&
                  iou_err <= 1e-9 && tok_err <= 1e-9 && ap_err <= 1e-9;
  return {ok, std::to_string(auc_checked - auc_mismatch) + "/" +
                  std::to_string(auc_checked) + " AUC exact, bias " +
                  fmt("%.1e", bias_err) + ", gmb " + fmt("%.1e", gmb_err) +
                  ", IOU-F1 " + fmt("%.1e", iou_err) + ", token-F1 " +
                  fmt("%.1e", tok_err) + ", AUPRC " + fmt("%.1e", ap_err)};
}

// ---- 3: masking semantics ----

corpus::Splits Lexicon(int n_posts, int max_len) {
  corpus::LexiconCorpusOptions o;
  o.n_posts = n_posts;
  const auto sc = corpus::make_lexicon_corpus(o);
  corpus::IngestOptions io;
  io.max_len = max_len;
  const auto r = corpus::ingest(sc.posts, sc.partition, io);
  return r.splits;
}

int LexiconVocab(int n_posts, int max_len) {
  corpus::LexiconCorpusOptions o;
  o.n_posts = n_posts;
  const auto sc = corpus::make_lexicon_corpus(o);
  corpus::IngestOptions io;
  io.max_len = max_len;
  return corpus::ingest(sc.posts, sc.partition, io).vocab.size();
}

Outcome MaskingSemantics() {
  const auto splits = Lexicon(200, 16);
  const int vocab = LexiconVocab(200, 16);
  const ModelConfig cfg = SmallModel(vocab, 16, 1, 2, 32, 16);
  EncoderModel<float> m(cfg);
  m.initialize(Rng(5));

  // (a) flipping targets at unmasked positions changes neither loss nor
  // gradient.
  bool a = true;
  int a_cases = 0;
  for (const auto& ex : splits.train) {
    if (ex.word_count() < 2) continue;
    Rng r = training::mask_rng(9, "accept", ex.id, 0);
    const auto plan = training::sample_mask(ex, 0.5, r);
    const auto inputs = training::mrp_input(ex, plan);
    std::vector<int> targets(ex.gold_rationale.begin(),
                             ex.gold_rationale.begin() + ex.attention_len);
    std::vector<std::uint8_t> mask(ex.attention_len, 0);
    for (int p : plan.positions) mask[p] = 1;
    const auto ids = std::span<const int>(ex.token_ids).first(ex.attention_len);
    auto grads = [&] {
      std::vector<float> g;
      for (auto* p : m.parameters()) {
        const auto v = p->grad.values();
        g.insert(g.end(), v.begin(), v.end());
      }
      return g;
    };
    m.zero_grad();
    const double l1 =
        training::rationale_loss(m, ids, inputs, targets, mask, 1.0).loss;
    const auto g1 = grads();
    for (int i = 0; i < ex.attention_len; ++i) {
      if (!mask[i]) targets[i] = 1 - targets[i];
    }
    m.zero_grad();
    const double l2 =
        training::rationale_loss(m, ids, inputs, targets, mask, 1.0).loss;
    a = a && l1 == l2 && g1 == grads();
    if (++a_cases == 50) break;
  }

  // (b) ratio 1.0 through the mrp path equals the rp path bitwise.
  training::TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 16;
  tc.lr = 1e-3;
  tc.seed = 21;
  auto mrp = training::init_model(cfg, Stage::kMrp, 21);
  auto rp = training::init_model(cfg, Stage::kRp, 21);
  tc.stage = Stage::kMrp;
  tc.mask_ratio = 1.0;
  training::train_stage(mrp, splits.train, tc);
  tc.stage = Stage::kRp;
  training::train_stage(rp, splits.train, tc);
  encoder::CheckpointHeader h;
  h.config = cfg;
  const bool b = encoder::checkpoint_payload(encoder::serialize_checkpoint(h, mrp)) ==
                 encoder::checkpoint_payload(encoder::serialize_checkpoint(h, rp));

  // (c) all-masked rationale input embeds exactly like no input.
  bool c = true;
  for (const auto& ex : splits.train) {
    const std::vector<RationaleInput> masked(ex.token_ids.size(),
                                             RationaleInput::kMasked);
    c = c && m.embed(ex.token_ids, masked) == m.embed(ex.token_ids);
  }
  return {a && b && c, std::string("(a) ") + (a ? "ok" : "FAIL") + " on " +
                           std::to_string(a_cases) + " examples, (b) " +
                           (b ? "ok" : "FAIL") + ", (c) " +
                           (c ? "ok" : "FAIL") + " on " +
                           std::to_string(splits.train.size()) + " examples"};
}

// ---- 4 and 5: lexicon corpus ----

ModelConfig LexiconModel(int vocab) { return SmallModel(vocab, 32, 1, 2, 64, 16); }

training::TrainConfig LexiconTrain(Stage stage, std::uint64_t seed) {
  training::TrainConfig tc = training::TrainConfig::defaults(stage);
  tc.lr = 1e-3;
  tc.epochs = 5;
  tc.batch_size = 16;
  tc.seed = seed;
  return tc;
}

double TestAccuracy(const EncoderModel<float>& m,
                    const std::vector<Example>& test) {
  const encoder::EncoderClassifier clf(m);
  int hit = 0;
  for (const auto& ex : test) {
    hit += encoder::argmax(clf.class_probs(ex.token_ids, ex.attention_len)) ==
           static_cast<int>(ex.label);
  }
  return static_cast<double>(hit) / test.size();
}

Outcome LexiconCorpus() {
  const auto splits = Lexicon(2000, 16);
  const auto cfg = LexiconModel(LexiconVocab(2000, 16));
  auto m = training::init_model(cfg, Stage::kMrp, 1);
  training::train_stage(m, splits.train, LexiconTrain(Stage::kMrp, 1));
  std::vector<Example> held = splits.val;
  held.insert(held.end(), splits.test.begin(), splits.test.end());
  const auto ev = training::evaluate_masked(m, held, 0.5, 1);
  auto det = training::init_detect_model(cfg, m, 1);
  training::train_stage(det, splits.train, LexiconTrain(Stage::kDetect, 1));
  const double acc = TestAccuracy(det, splits.test);
  return {ev.accuracy >= 0.95 && acc >= 0.95,
          "held-out masked accuracy " + fmt("%.4f", ev.accuracy) + " (" +
              std::to_string(ev.count) + " tokens), test accuracy " +
              fmt("%.4f", acc)};
}

Outcome MaskRatioOrder() {
  const auto splits = Lexicon(2000, 16);
  const auto cfg = LexiconModel(LexiconVocab(2000, 16));
  std::vector<Example> held = splits.val;
  held.insert(held.end(), splits.test.begin(), splits.test.end());
  const double ratios[] = {0.25, 0.5, 1.0};
  // [ratio][seed]: masked-rationale objective summed over each post's
  // masked positions, averaged over posts; and the per-token mean.
  std::vector<std::vector<double>> per_post(3, std::vector<double>(3));
  std::vector<std::vector<double>> per_token(3, std::vector<double>(3));
  cli::parallel_for(9, 0, [&](int job) {
    const int r = job / 3, s = job % 3;
    auto tc = LexiconTrain(Stage::kMrp, s + 1);
    tc.mask_ratio = ratios[r];
    auto m = training::init_model(cfg, Stage::kMrp, s + 1);
    training::train_stage(m, splits.train, tc);
    const auto ev = training::evaluate_masked(m, held, ratios[r], s + 1);
    per_token[r][s] = ev.loss;
    per_post[r][s] = ev.loss * ev.count / held.size();
  });
  double med[3], tok[3];
  for (int r = 0; r < 3; ++r) {
    med[r] = median(per_post[r]);
    tok[r] = median(per_token[r]);
  }
  const bool ok = med[0] <= med[1] && med[1] <= med[2];
  std::string d = "per-post masked loss 0.25:" + fmt("%.3e", med[0]) +
                  " 0.5:" + fmt("%.3e", med[1]) + " 1.0:" +
                  fmt("%.3e", med[2]) + "; per-token mean (not gated) 0.25:" +
                  fmt("%.3e", tok[0]) + " 0.5:" + fmt("%.3e", tok[1]) +
                  " 1.0:" + fmt("%.3e", tok[2]);
  return {ok, d};
}

// ---- 6: bias sensitivity ----

Outcome BiasSensitivity() {
  const std::string target = "Islam";
  const auto f = testing::MakeBiasFixture(target);
  auto oracle = [&](const std::vector<metrics::PredictionRecord>& recs,
                    const std::string& g, int kind) {
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (const auto& r : recs) {
      const bool in = r.in_group(g);
      const bool keep = kind == 0   ? in
                        : kind == 1 ? in != r.gold_toxic()
                                    : in == r.gold_toxic();
      if (keep) {
        s.push_back(r.toxic_score());
        y.push_back(r.gold_toxic());
      }
    }
    return *testing::PairCountAuc(s, y);
  };
  auto gmb_bpsn = [&](const std::vector<metrics::PredictionRecord>& recs) {
    std::vector<double> v;
    for (auto g : corpus::kTargetGroups) v.push_back(oracle(recs, std::string(g), 1));
    return testing::DirectPowerMean(v, -5);
  };
  const double sub = oracle(f.biased, target, 0);
  const double bpsn = oracle(f.biased, target, 1);
  const double g_unbiased = gmb_bpsn(f.unbiased);
  const double g_biased = gmb_bpsn(f.biased);
  // The library agrees with the oracle.
  const auto lib = metrics::bias_aucs(f.biased, target);
  const bool agree = *lib.subgroup == sub && *lib.bpsn == bpsn;
  const bool ok = agree && sub - bpsn >= 0.05 && g_unbiased - g_biased >= 0.05;
  return {ok, target + ": subgroup " + fmt("%.4f", sub) + " - BPSN " +
                  fmt("%.4f", bpsn) + " = " + fmt("%.4f", sub - bpsn) +
                  "; GMB-BPSN unbiased " + fmt("%.4f", g_unbiased) +
                  " - biased " + fmt("%.4f", g_biased) + " = " +
                  fmt("%.4f", g_unbiased - g_biased) +
                  (agree ? "" : "; library disagrees with oracle")};
}

// ---- 7: faithfulness ----

Outcome FaithfulnessSanity() {
  const int planted = 42;
  const testing::SingleTokenClassifier clf(planted);
  Rng data(77);
  std::vector<Example> exs;
  for (int e = 0; e < 40; ++e) {
    const int len = 8 + static_cast<int>(data.uniform_int(8));
    std::vector<int> words;
    for (int i = 0; i < len; ++i) {
      words.push_back(Vocabulary::kNumSpecial + static_cast<int>(data.uniform_int(30)));
    }
    words[data.uniform_int(len)] = planted;
    exs.push_back(Sequence("f" + std::to_string(e), words, {}, Label::kHatespeech, 0));
  }
  std::vector<std::vector<double>> scores;
  for (const auto& ex : exs) {
    Rng rng = Rng(1).derive("lime").derive(ex.id);
    scores.push_back(explain::lime_scores(clf, ex, {}, rng).scores);
  }
  const auto top5 = metrics::faithfulness(clf, exs, scores, 5);

  // r = the whole sentence.
  double full_suff = 0;
  for (std::size_t i = 0; i < exs.size(); ++i) {
    const auto& ex = exs[i];
    const auto one = metrics::faithfulness(
        clf, std::span<const Example>(&ex, 1),
        std::span<const std::vector<double>>(&scores[i], 1), ex.word_count());
    full_suff = std::max(full_suff, std::abs(one.sufficiency));
  }
  const bool ok = top5.comprehensiveness >= 0.8 && top5.sufficiency <= 0.05 &&
                  full_suff == 0.0;
  return {ok, "top-5 LIME comprehensiveness " +
                  fmt("%.4f", top5.comprehensiveness) + ", sufficiency " +
                  fmt("%.4f", top5.sufficiency) + " over " +
                  std::to_string(top5.instances) +
                  " posts; full-sentence sufficiency " + fmt("%g", full_suff)};
}

// ---- 8: determinism and provenance ----

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Outcome Determinism() {
  const fs::path dir = fs::temp_directory_path() / "mrp_acceptance_c8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "data.posts = " << (dir / "out" / "posts.json").string() << "\n"
        << "data.split = " << (dir / "out" / "split.json").string() << "\n"
        << "output_dir = " << (dir / "out").string() << "\n"
        << "model.d_model = 16\nmodel.n_layers = 1\nmodel.n_heads = 2\n"
        << "model.ff_dim = 32\nmodel.dropout = 0.1\ningest.max_len = 16\n"
        << "stage1.epochs = 2\ndetect.epochs = 2\nstage1.lr = 1e-3\n"
        << "detect.lr = 1e-3\nlime.n_samples = 50\nseed = 13\n";
  }
  const std::string cfg = (dir / "run.cfg").string();

  std::string first_id;
  auto run_all = [&](const std::string& threads) {
    std::vector<std::vector<std::string>> cmds = {
        {"synth", "--kind", "context", "--posts", "300"},
        {"ingest"},
        {"train", "--stage", "mrp"},
        {"train", "--stage", "rp"},
        {"train", "--stage", "mlm"},
        {"train", "--stage", "detect", "--init", (dir / "out" / "mrp.ckpt").string()},
        {"eval"},
    };
    int bad = 0;
    for (auto c : cmds) {
      c.insert(c.begin(), {"mrp", "--config", cfg, "--threads", threads});
      std::ostringstream out, err;
      bad += cli::run_cli(c, out, err) != 0;
    }
    if (first_id.empty()) {
      std::ifstream in(dir / "out" / "examples.jsonl");
      first_id = corpus::read_examples_jsonl(in).test.front().id;
    }
    for (const char* method : {"attention", "lime"}) {
      std::ostringstream out, err;
      bad += cli::run_cli({"mrp", "--config", cfg, "explain", "--method",
                           method, "--id", first_id},
                          out, err) != 0;
    }
    return bad;
  };
  const int bad1 = run_all("1");
  const auto a = Snapshot(dir / "out");
  const int bad2 = run_all("4");
  const auto b = Snapshot(dir / "out");

  int differ = 0;
  for (const auto& [k, v] : a) differ += !b.count(k) || b.at(k) != v;

  // Provenance: every artifact carries the run config.
  int missing = 0, artifacts = 0;
  cli::RunConfig rc = cli::RunConfig::from_file(cfg);
  for (const auto& [name, bytes] : b) {
    if (name == "posts.json" || name == "split.json") continue;  // inputs
    ++artifacts;
    nlohmann::json j;
    if (name.ends_with(".ckpt")) {
      j = encoder::deserialize_checkpoint(bytes).header.run_config;
    } else if (name.ends_with(".jsonl")) {
      const auto line = bytes.substr(0, bytes.find('\n'));
      j = nlohmann::json::parse(line)["provenance"]["run_config"];
    } else if (name.ends_with(".json")) {
      j = nlohmann::json::parse(bytes)["run_config"];
    } else {
      --artifacts;  // report.csv is a flat view of report.json
      continue;
    }
    // The detect command ran with --init on top of the file.
    cli::RunConfig expected = rc;
    if (name.starts_with("detect")) {
      expected.set("detect.init_checkpoint",
                   (dir / "out" / "mrp.ckpt").string());
    }
    if (j != expected.to_json()) {
      ++missing;
      std::fprintf(stderr, "no run config: %s\n", name.c_str());
    }
  }
  fs::remove_all(dir);
  const bool ok = bad1 == 0 && bad2 == 0 && differ == 0 && missing == 0 &&
                  a.size() == b.size();
  return {ok, std::to_string(a.size()) + " files, " + std::to_string(differ) +
                  " differ between runs (threads 1 vs 4); run config in " +
                  std::to_string(artifacts - missing) + "/" +
                  std::to_string(artifacts) + " artifacts" +
                  (bad1 + bad2 ? "; a command failed" : "")};
}

// ---- 9: MRP benefit ----

Outcome MrpBenefit() {
  corpus::ContextCorpusOptions co;
  const auto sc = corpus::make_context_corpus(co);
  corpus::IngestOptions io;
  io.max_len = 16;
  const auto data = corpus::ingest(sc.posts, sc.partition, io);
  const auto cfg = SmallModel(data.vocab.size(), 32, 2, 2, 64, 16);
  auto train_cfg = [](Stage stage, std::uint64_t seed) {
    auto tc = training::TrainConfig::defaults(stage);
    tc.lr = 1e-3;
    tc.epochs = 10;
    tc.batch_size = 16;
    tc.seed = seed;
    return tc;
  };
  auto macro_f1 = [&](const EncoderModel<float>& m) {
    const encoder::EncoderClassifier clf(m);
    std::vector<metrics::PredictionRecord> recs;
    for (const auto& ex : data.splits.test) {
      metrics::PredictionRecord r;
      r.gold = ex.label;
      r.probs = clf.class_probs(ex.token_ids, ex.attention_len);
      r.predicted = encoder::argmax(r.probs);
      recs.push_back(r);
    }
    return metrics::performance(recs).macro_f1;
  };
  std::vector<double> with(5), without(5);
  cli::parallel_for(10, 0, [&](int job) {
    const std::uint64_t seed = job / 2 + 1;
    if (job % 2 == 0) {
      auto m = training::init_model(cfg, Stage::kMrp, seed);
      training::train_stage(m, data.splits.train, train_cfg(Stage::kMrp, seed));
      auto d = training::init_detect_model(cfg, m, seed);
      training::train_stage(d, data.splits.train, train_cfg(Stage::kDetect, seed));
      with[job / 2] = macro_f1(d);
    } else {
      auto d = training::init_model(cfg, Stage::kDetect, seed);
      training::train_stage(d, data.splits.train, train_cfg(Stage::kDetect, seed));
      without[job / 2] = macro_f1(d);
    }
  });
  const double a = median(with), b = median(without);
  std::string seeds;
  for (int s = 0; s < 5; ++s) {
    seeds += " " + fmt("%.4f", with[s]) + "/" + fmt("%.4f", without[s]);
  }
  return {a - b >= 0, "median test macro-F1 MRP " + fmt("%.4f", a) +
                          " vs baseline " + fmt("%.4f", b) + ", margin " +
                          fmt("%+.4f", a - b) + " (per seed MRP/base:" +
                          seeds + ")"};
}

}  // namespace
}  // namespace mrp

int main() {
  struct Criterion {
    const char* name;
    std::function<mrp::Outcome()> run;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Criterion> criteria = {
      {"1 gradient soundness", mrp::GradientSoundness, 60},
      {"2 metric oracle equivalence", mrp::MetricOracles, 30},
      {"3 masking semantics", mrp::MaskingSemantics, 0},
      {"4 lexicon corpus", mrp::LexiconCorpus, 300},
      {"5 mask-ratio monotonicity", mrp::MaskRatioOrder, 0},
      {"6 bias-metric sensitivity", mrp::BiasSensitivity, 0},
      {"7 faithfulness sanity", mrp::FaithfulnessSanity, 0},
      {"8 determinism and provenance", mrp::Determinism, 0},
      {"9 directional MRP benefit", mrp::MrpBenefit, 0},
  };
  int failed = 0;
  for (const auto& [name, run, time_limit] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    mrp::Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    if (time_limit > 0 && secs > time_limit) {
      o.pass = false;
      o.detail += "; over the " + mrp::fmt("%g", time_limit) + " s limit";
    }
    std::printf("%s criterion %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL",
                name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
