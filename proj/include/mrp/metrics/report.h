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

#ifndef MRP_METRICS_REPORT_H_
#define MRP_METRICS_REPORT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mrp/metrics/metrics.h"

namespace mrp::metrics {

struct GroupBias {
  std::string group;
  BiasAucs aucs;
};

struct MethodReport {
  std::string method;
  Plausibility plausibility;
  Faithfulness faithfulness;
};

struct EvalReport {
  Performance performance;
  std::vector<GroupBias> groups;
  std::optional<double> gmb_subgroup, gmb_bpsn, gmb_bnsp;
  double gmb_power = kGmbPower;
  std::vector<MethodReport> methods;
  std::vector<std::string> notes;

  // {performance, bias: {gmb_*, groups}, explainability: {method: {...}},
  // notes}. Absent values are null.
  nlohmann::json to_json() const;
  // "model,metric,value" rows; absent values are empty.
  std::string to_csv(std::string_view model) const;
};

// GMB over the groups whose AUC is defined. Absent (with a note) when no
// group qualifies or a value is not positive.
std::optional<double> gmb_of(const std::vector<std::optional<double>>& values,
                             double p, std::string_view what,
                             std::vector<std::string>& notes);

// Performance and bias over `records`, for `groups` (the ten target groups
// by default), plus the given per-method explainability results.
EvalReport build_report(std::span<const PredictionRecord> records,
                        std::vector<MethodReport> methods,
                        double gmb_power = kGmbPower,
                        std::span<const std::string_view> groups = {});

}  // namespace mrp::metrics

#endif  // MRP_METRICS_REPORT_H_
