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

#ifndef MRP_METRICS_METRICS_H_
#define MRP_METRICS_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrp/corpus/types.h"
#include "mrp/encoder/classifier.h"

namespace mrp::metrics {

struct PredictionRecord {
  std::string id;
  corpus::Label gold = corpus::Label::kNormal;
  int predicted = 0;
  encoder::ClassProbs probs{};
  std::vector<std::string> target_groups;

  // P(offensive) + P(hatespeech).
  double toxic_score() const { return probs[1] + probs[2]; }
  bool gold_toxic() const { return corpus::is_toxic(gold); }
  bool in_group(std::string_view group) const;
};

// Mann-Whitney AUC: the probability that a random positive outscores a
// random negative, ties counting one half. Absent unless both classes
// occur.
std::optional<double> auc(std::span<const double> scores,
                          std::span<const std::uint8_t> labels);

struct BiasAucs {
  std::optional<double> subgroup;  // in-group records only
  std::optional<double> bpsn;      // background toxic + in-group non-toxic
  std::optional<double> bnsp;      // background non-toxic + in-group toxic
};

// AUCs of toxic_score against gold toxicity over the three record subsets
// for `group`.
BiasAucs bias_aucs(std::span<const PredictionRecord> records,
                   std::string_view group);

inline constexpr double kGmbPower = -5.0;

// Power mean (1/N sum v^p)^(1/p); p == 0 is the geometric mean. Throws
// InputError on an empty input or a non-positive value with p <= 0.
double gmb(std::span<const double> values, double p = kGmbPower);

// Maximal runs of 1s as half-open [begin, end) spans.
std::vector<std::pair<int, int>> spans(std::span<const std::uint8_t> bits);

struct Plausibility {
  double iou_f1 = 0.0;
  double token_f1 = 0.0;
  double auprc = 0.0;
  int instances = 0;
};

// Per-instance comparison of token scores with the gold rationale.
// Instances whose gold rationale is all zero are skipped. A token is
// predicted when its score is strictly greater than `threshold`.
//  - iou_f1: predicted spans match when their best IOU with a gold span is
//    >= iou_match; F1 of the instance-averaged (macro) precision and recall
//    of matches.
//  - token_f1: mean over instances of the token-level F1.
//  - auprc: mean over instances of the average precision of the scores.
Plausibility plausibility(std::span<const std::vector<std::uint8_t>> gold,
                          std::span<const std::vector<double>> scores,
                          double threshold = 0.5, double iou_match = 0.5);

// sum over recall steps of (R_n - R_{n-1}) * P_n, thresholds taken at every
// distinct score, highest first. Absent when no positive label.
std::optional<double> average_precision(std::span<const double> scores,
                                        std::span<const std::uint8_t> labels);

struct Faithfulness {
  double comprehensiveness = 0.0;
  double sufficiency = 0.0;
  int instances = 0;
};

// Indices of the k highest scores, ties to the lower index, returned in
// ascending order. Fewer than k scores returns all of them.
std::vector<int> top_k(std::span<const double> scores, int k);

// The example's real sequence with the given word indices (0-based over
// words) removed (`keep` false) or kept alone (`keep` true). CLS and SEP
// stay; the remaining words close up.
std::vector<int> rewrite_words(const corpus::Example& example,
                               std::span<const int> words, bool keep);

// Means over examples of p_j(x) - p_j(x without r) and p_j(x) - p_j(r),
// with j the class predicted on x and r the top-k words. Throws
// InputError when k < 1 or the spans differ in length.
Faithfulness faithfulness(const encoder::Classifier& model,
                          std::span<const corpus::Example> examples,
                          std::span<const std::vector<double>> scores,
                          int k = 5);

struct Performance {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> auroc;  // macro one-vs-rest over defined classes
  std::vector<std::string> notes;
};

// Throws InputError on an empty input. A class with no gold and no
// predicted record contributes F1 0 and a note.
Performance performance(std::span<const PredictionRecord> records);

}  // namespace mrp::metrics

#endif  // MRP_METRICS_METRICS_H_
