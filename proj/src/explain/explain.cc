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

#include "mrp/explain/explain.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mrp/corpus/vocabulary.h"
#include "mrp/errors.h"

namespace mrp::explain {

std::string method_name(Method method) {
  return method == Method::kAttention ? "attention" : "lime";
}

Method parse_method(std::string_view name) {
  if (name == "attention") return Method::kAttention;
  if (name == "lime") return Method::kLime;
  throw InputError("unknown explanation method '" + std::string(name) +
                   "' (expected attention or lime)");
}

namespace {

void max_normalize(std::vector<double>& v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, x);
  if (mx <= 0.0) return;
  for (double& x : v) x /= mx;
}

}  // namespace

TokenScores attention_scores(const encoder::EncoderModel<float>& model,
                             const corpus::Example& example, bool head_max) {
  const int n = example.attention_len;
  const auto ids = std::span<const int>(example.token_ids).first(n);
  const auto trace = model.forward(model.embed(ids), n);
  const auto probs = numcore::softmax_rows(model.class_logits(trace));
  TokenScores out;
  out.method = Method::kAttention;
  for (int c = 0; c < 3; ++c) out.class_probs[c] = probs(0, c);
  out.predicted_class = encoder::argmax(out.class_probs);
  const auto cls = encoder::last_layer_cls_attention(trace, head_max);
  out.scores.assign(cls.begin() + 1, cls.begin() + (n - 1));
  max_normalize(out.scores);
  return out;
}

std::vector<double> weighted_ridge(const std::vector<std::vector<double>>& x,
                                   const std::vector<double>& y,
                                   const std::vector<double>& w,
                                   double lambda) {
  const int n = static_cast<int>(x.size());
  if (n == 0 || y.size() != x.size() || w.size() != x.size()) {
    throw InputError("weighted_ridge: inconsistent sizes");
  }
  const int k = static_cast<int>(x[0].size());
  double wsum = 0.0;
  for (double v : w) wsum += v;
  if (!(wsum > 0.0)) throw NumericError("weighted_ridge: zero total weight");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) mean[j] += w[i] * x[i][j];
  }
  mean /= wsum;
  // Centering x removes the intercept; y needs no centering because the
  // weighted columns of the centered design sum to zero.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd xc(k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) xc[j] = x[i][j] - mean[j];
    a.noalias() += w[i] * xc * xc.transpose();
    rhs += w[i] * y[i] * xc;
  }
  auto solve = [&](double lam, Eigen::VectorXd& beta) {
    Eigen::MatrixXd m = a;
    m.diagonal().array() += lam;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return false;
    beta = llt.solve(rhs);
    return beta.allFinite();
  };
  Eigen::VectorXd beta;
  if (!solve(lambda, beta) && !solve(lambda * 10.0 + 1e-6, beta)) {
    throw NumericError("weighted_ridge: singular system");
  }
  return {beta.data(), beta.data() + k};
}

TokenScores lime_scores(const encoder::Classifier& model,
                        const corpus::Example& example,
                        const LimeOptions& options, numcore::Rng& rng) {
  const int k = example.word_count();
  const int n = example.attention_len;
  if (k < 1) throw InputError("example " + example.id + " has no words");
  if (options.n_samples < 2 * k) {
    throw InputError("lime: n_samples " + std::to_string(options.n_samples) +
                     " < 2 x " + std::to_string(k) + " words");
  }
  if (!(options.kernel_width > 0.0)) {
    throw InputError("lime: kernel_width must be > 0");
  }
  const std::vector<int> base(example.token_ids.begin(),
                              example.token_ids.begin() + n);
  TokenScores out;
  out.method = Method::kLime;
  out.class_probs = model.class_probs(base, n);
  out.predicted_class = encoder::argmax(out.class_probs);
  const int j = out.predicted_class;

  std::vector<std::vector<double>> x;
  std::vector<double> y, w;
  std::vector<int> order(k);
  for (int s = 0; s < options.n_samples; ++s) {
    std::vector<double> keep(k, 1.0);
    if (s > 0) {
      const int drop = 1 + static_cast<int>(rng.uniform_int(k));
      for (int i = 0; i < k; ++i) order[i] = i;
      for (int i = 0; i < drop; ++i) {
        const int r = i + static_cast<int>(rng.uniform_int(k - i));
        std::swap(order[i], order[r]);
        keep[order[i]] = 0.0;
      }
    }
    std::vector<int> ids = base;
    int dropped = 0;
    for (int i = 0; i < k; ++i) {
      if (keep[i] == 0.0) {
        ids[i + 1] = corpus::Vocabulary::kPad;
        ++dropped;
      }
    }
    const double d = static_cast<double>(dropped) / k;
    x.push_back(std::move(keep));
    y.push_back(model.class_probs(ids, n)[j]);
    w.push_back(std::exp(-(d * d) / (options.kernel_width * options.kernel_width)));
  }
  // Shifting y by the unperturbed value leaves the slopes unchanged and makes
  // a constant model give exactly zero.
  const double y0 = y[0];
  for (double& v : y) v -= y0;
  out.raw_coefficients = weighted_ridge(x, y, w, options.ridge_lambda);
  out.scores.resize(k);
  for (int i = 0; i < k; ++i) {
    out.scores[i] = std::max(0.0, out.raw_coefficients[i]);
  }
  max_normalize(out.scores);
  return out;
}

nlohmann::json score_dump_json(const corpus::Example& example,
                               const TokenScores& scores) {
  nlohmann::json j = {{"id", example.id},
                      {"method", method_name(scores.method)},
                      {"predicted_class", scores.predicted_class},
                      {"class_probs", scores.class_probs},
                      {"tokens", example.words},
                      {"scores", scores.scores}};
  if (!scores.raw_coefficients.empty()) {
    j["raw_coefficients"] = scores.raw_coefficients;
  }
  return j;
}

TokenScores score_dump_from_json(const nlohmann::json& j, std::string* id) {
  TokenScores out;
  try {
    out.method = parse_method(j.at("method").get<std::string>());
    out.predicted_class = j.at("predicted_class").get<int>();
    out.class_probs = j.at("class_probs").get<encoder::ClassProbs>();
    out.scores = j.at("scores").get<std::vector<double>>();
    if (j.contains("raw_coefficients")) {
      out.raw_coefficients = j["raw_coefficients"].get<std::vector<double>>();
    }
    if (id != nullptr) *id = j.at("id").get<std::string>();
    if (j.at("tokens").size() != out.scores.size()) {
      throw InputError("score dump: tokens and scores differ in length");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed score dump: ") + e.what());
  }
  return out;
}

}  // namespace mrp::explain
