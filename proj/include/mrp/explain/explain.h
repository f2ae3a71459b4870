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

#ifndef MRP_EXPLAIN_EXPLAIN_H_
#define MRP_EXPLAIN_EXPLAIN_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mrp/corpus/types.h"
#include "mrp/encoder/classifier.h"
#include "mrp/encoder/model.h"
#include "mrp/numcore/rng.h"

namespace mrp::explain {

enum class Method { kAttention, kLime };

std::string method_name(Method method);
// Throws InputError on anything but "attention" or "lime".
Method parse_method(std::string_view name);

// One importance score per real word (CLS/SEP/PAD stripped), non-negative
// and max-normalized; all zero is allowed.
struct TokenScores {
  Method method = Method::kAttention;
  int predicted_class = 0;
  encoder::ClassProbs class_probs{};
  std::vector<double> scores;
  // LIME only: the signed surrogate coefficients before clamping.
  std::vector<double> raw_coefficients;
};

// Last layer, CLS query row, reduced over heads (mean unless `head_max`),
// restricted to the word positions, then max-normalized.
TokenScores attention_scores(const encoder::EncoderModel<float>& model,
                             const corpus::Example& example,
                             bool head_max = false);

struct LimeOptions {
  int n_samples = 500;
  double kernel_width = 0.25;
  double ridge_lambda = 1.0;
};

// Perturbation surrogate. Sample 0 keeps every word; the others drop a
// uniformly chosen number (1..k) of uniformly chosen words, replacing them
// with [PAD] in place. The surrogate regresses the probability of the
// originally predicted class on the keep bits, weighted by
// exp(-D^2 / w^2) with D the fraction of words dropped, with an
// unpenalized intercept and an L2 penalty on the coefficients.
//
// Throws InputError when n_samples < 2 * word count. A singular system is
// retried once with ten times the ridge penalty, then NumericError.
TokenScores lime_scores(const encoder::Classifier& model,
                        const corpus::Example& example,
                        const LimeOptions& options, numcore::Rng& rng);

// Weighted ridge regression with an intercept: minimizes
// sum_i w_i (y_i - b - x_i . beta)^2 + lambda |beta|^2 and returns beta.
// Exposed for testing.
std::vector<double> weighted_ridge(const std::vector<std::vector<double>>& x,
                                   const std::vector<double>& y,
                                   const std::vector<double>& w,
                                   double lambda);

// Score-dump line: {id, method, predicted_class, class_probs, tokens,
// scores, raw_coefficients?}.
nlohmann::json score_dump_json(const corpus::Example& example,
                               const TokenScores& scores);
// Inverse of score_dump_json; returns the id via `id` when non-null.
TokenScores score_dump_from_json(const nlohmann::json& j,
                                 std::string* id = nullptr);

}  // namespace mrp::explain

#endif  // MRP_EXPLAIN_EXPLAIN_H_
