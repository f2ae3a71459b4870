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

#include "mrp/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrp/errors.h"

namespace mrp::metrics {

bool PredictionRecord::in_group(std::string_view group) const {
  return std::find(target_groups.begin(), target_groups.end(), group) !=
         target_groups.end();
}

std::optional<double> auc(std::span<const double> scores,
                          std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw InputError("auc: scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Midranks (1-based), then U = rank sum of positives - P(P+1)/2.
  double pos_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        pos_rank_sum += rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) return std::nullopt;
  return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

namespace {

template <typename Pred>
std::optional<double> subset_auc(std::span<const PredictionRecord> records,
                                 Pred keep) {
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  for (const auto& r : records) {
    if (!keep(r)) continue;
    s.push_back(r.toxic_score());
    y.push_back(r.gold_toxic());
  }
  return auc(s, y);
}

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

BiasAucs bias_aucs(std::span<const PredictionRecord> records,
                   std::string_view group) {
  BiasAucs out;
  out.subgroup = subset_auc(records, [&](const auto& r) { return r.in_group(group); });
  out.bpsn = subset_auc(records, [&](const auto& r) {
    return r.in_group(group) ? !r.gold_toxic() : r.gold_toxic();
  });
  out.bnsp = subset_auc(records, [&](const auto& r) {
    return r.in_group(group) ? r.gold_toxic() : !r.gold_toxic();
  });
  return out;
}

double gmb(std::span<const double> values, double p) {
  if (values.empty()) throw InputError("gmb: no values");
  const double n = static_cast<double>(values.size());
  if (p == 0.0) {
    double log_sum = 0.0;
    for (double v : values) {
      if (!(v > 0.0)) throw InputError("gmb: non-positive value with p = 0");
      log_sum += std::log(v);
    }
    return std::exp(log_sum / n);
  }
  double sum = 0.0;
  for (double v : values) {
    if (p < 0.0 && !(v > 0.0)) {
      throw InputError("gmb: non-positive value with negative p");
    }
    sum += std::pow(v, p);
  }
  return std::pow(sum / n, 1.0 / p);
}

std::vector<std::pair<int, int>> spans(std::span<const std::uint8_t> bits) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(bits.size());
  for (int i = 0; i < n;) {
    if (!bits[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && bits[j]) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw InputError("average_precision: length mismatch");
  }
  const std::size_t n = scores.size();
  double total_pos = 0.0;
  for (auto l : labels) total_pos += l != 0;
  if (total_pos == 0.0) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double tp = 0.0, fp = 0.0, prev_recall = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
      ++j;
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    i = j;
  }
  return ap;
}

Plausibility plausibility(std::span<const std::vector<std::uint8_t>> gold,
                          std::span<const std::vector<double>> scores,
                          double threshold, double iou_match) {
  if (gold.size() != scores.size()) {
    throw InputError("plausibility: gold and scores differ in count");
  }
  Plausibility out;
  double recall_sum = 0.0, precision_sum = 0.0, token_f1_sum = 0.0,
         ap_sum = 0.0;
  int with_pred = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& g = gold[i];
    const auto& s = scores[i];
    if (g.size() != s.size()) {
      throw InputError("plausibility: instance " + std::to_string(i) +
                       " has " + std::to_string(s.size()) + " scores for " +
                       std::to_string(g.size()) + " tokens");
    }
    const auto gold_spans = spans(g);
    if (gold_spans.empty()) continue;
    ++out.instances;

    std::vector<std::uint8_t> pred(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) pred[t] = s[t] > threshold;
    const auto pred_spans = spans(pred);
    int matches = 0;
    for (const auto& [pb, pe] : pred_spans) {
      double best = 0.0;
      for (const auto& [gb, ge] : gold_spans) {
        const int inter = std::max(0, std::min(pe, ge) - std::max(pb, gb));
        const int uni = (pe - pb) + (ge - gb) - inter;
        best = std::max(best, static_cast<double>(inter) / uni);
      }
      matches += best >= iou_match;
    }
    recall_sum += static_cast<double>(matches) / gold_spans.size();
    if (!pred_spans.empty()) {
      precision_sum += static_cast<double>(matches) / pred_spans.size();
      ++with_pred;
    }

    double tp = 0.0, n_pred = 0.0, n_gold = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
      tp += (pred[t] && g[t]);
      n_pred += pred[t] != 0;
      n_gold += g[t] != 0;
    }
    token_f1_sum += f1(n_pred > 0 ? tp / n_pred : 0.0, tp / n_gold);
    ap_sum += *average_precision(s, g);
  }
  if (out.instances == 0) return out;
  const double n = out.instances;
  const double macro_r = recall_sum / n;
  const double macro_p = with_pred > 0 ? precision_sum / with_pred : 0.0;
  out.iou_f1 = f1(macro_p, macro_r);
  out.token_f1 = token_f1_sum / n;
  out.auprc = ap_sum / n;
  return out;
}

std::vector<int> top_k(std::span<const double> scores, int k) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  if (static_cast<int>(idx.size()) > k) idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<int> rewrite_words(const corpus::Example& example,
                               std::span<const int> words, bool keep) {
  const int k = example.word_count();
  std::vector<std::uint8_t> selected(k, 0);
  for (int w : words) {
    if (w < 0 || w >= k) throw InputError("rewrite_words: index out of range");
    selected[w] = 1;
  }
  std::vector<int> ids = {example.token_ids[0]};
  for (int w = 0; w < k; ++w) {
    if ((selected[w] != 0) == keep) ids.push_back(example.token_ids[w + 1]);
  }
  ids.push_back(example.token_ids[example.attention_len - 1]);
  return ids;
}

Faithfulness faithfulness(const encoder::Classifier& model,
                          std::span<const corpus::Example> examples,
                          std::span<const std::vector<double>> scores, int k) {
  if (k < 1) throw InputError("faithfulness: k must be >= 1");
  if (examples.size() != scores.size()) {
    throw InputError("faithfulness: examples and scores differ in count");
  }
  Faithfulness out;
  double comp = 0.0, suff = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (static_cast<int>(scores[i].size()) != ex.word_count()) {
      throw InputError("faithfulness: score count mismatch for " + ex.id);
    }
    const std::vector<int> x(ex.token_ids.begin(),
                             ex.token_ids.begin() + ex.attention_len);
    const auto px = model.class_probs(x, ex.attention_len);
    const int j = encoder::argmax(px);
    const auto r = top_k(scores[i], k);
    const auto without = rewrite_words(ex, r, false);
    const auto only = rewrite_words(ex, r, true);
    comp += px[j] - model.class_probs(without,
                                      static_cast<int>(without.size()))[j];
    suff += px[j] - model.class_probs(only, static_cast<int>(only.size()))[j];
    ++out.instances;
  }
  if (out.instances > 0) {
    out.comprehensiveness = comp / out.instances;
    out.sufficiency = suff / out.instances;
  }
  return out;
}

Performance performance(std::span<const PredictionRecord> records) {
  if (records.empty()) throw InputError("performance: no records");
  Performance out;
  int correct = 0;
  int tp[3] = {}, fp[3] = {}, fn[3] = {};
  for (const auto& r : records) {
    const int g = static_cast<int>(r.gold);
    if (r.predicted == g) {
      ++correct;
      ++tp[g];
    } else {
      ++fp[r.predicted];
      ++fn[g];
    }
  }
  out.accuracy = static_cast<double>(correct) / records.size();
  double f1_sum = 0.0, auc_sum = 0.0;
  int auc_classes = 0;
  for (int c = 0; c < 3; ++c) {
    const std::string name(corpus::label_name(static_cast<corpus::Label>(c)));
    if (tp[c] + fp[c] + fn[c] == 0) {
      out.notes.push_back("class " + name + " absent; F1 counted as 0");
    } else {
      f1_sum += 2.0 * tp[c] / (2.0 * tp[c] + fp[c] + fn[c]);
    }
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    for (const auto& r : records) {
      s.push_back(r.probs[c]);
      y.push_back(static_cast<int>(r.gold) == c);
    }
    if (const auto a = auc(s, y)) {
      auc_sum += *a;
      ++auc_classes;
    } else {
      out.notes.push_back("class " + name + " AUROC undefined");
    }
  }
  out.macro_f1 = f1_sum / 3.0;
  if (auc_classes > 0) out.auroc = auc_sum / auc_classes;
  return out;
}

}  // namespace mrp::metrics
