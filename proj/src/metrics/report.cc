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

#include "mrp/metrics/report.h"

#include <cstdio>
#include <sstream>

#include "mrp/errors.h"

namespace mrp::metrics {
namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

}  // namespace

std::optional<double> gmb_of(const std::vector<std::optional<double>>& values,
                             double p, std::string_view what,
                             std::vector<std::string>& notes) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  if (defined.empty()) {
    notes.push_back("gmb_" + std::string(what) + ": no group has a defined AUC");
    return std::nullopt;
  }
  try {
    return gmb(defined, p);
  } catch (const InputError& e) {
    notes.push_back("gmb_" + std::string(what) + ": " + e.what());
    return std::nullopt;
  }
}

EvalReport build_report(std::span<const PredictionRecord> records,
                        std::vector<MethodReport> methods, double gmb_power,
                        std::span<const std::string_view> groups) {
  if (groups.empty()) groups = corpus::kTargetGroups;
  EvalReport r;
  r.performance = performance(records);
  r.notes = r.performance.notes;
  r.gmb_power = gmb_power;
  std::vector<std::optional<double>> sub, bpsn, bnsp;
  for (auto g : groups) {
    GroupBias gb{std::string(g), bias_aucs(records, g)};
    if (!gb.aucs.subgroup) {
      r.notes.push_back("group " + gb.group + ": subgroup AUC undefined");
    }
    sub.push_back(gb.aucs.subgroup);
    bpsn.push_back(gb.aucs.bpsn);
    bnsp.push_back(gb.aucs.bnsp);
    r.groups.push_back(std::move(gb));
  }
  r.gmb_subgroup = gmb_of(sub, gmb_power, "subgroup", r.notes);
  r.gmb_bpsn = gmb_of(bpsn, gmb_power, "bpsn", r.notes);
  r.gmb_bnsp = gmb_of(bnsp, gmb_power, "bnsp", r.notes);
  r.methods = std::move(methods);
  return r;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json groups_json = nlohmann::json::object();
  for (const auto& g : groups) {
    groups_json[g.group] = {{"subgroup_auc", opt(g.aucs.subgroup)},
                            {"bpsn_auc", opt(g.aucs.bpsn)},
                            {"bnsp_auc", opt(g.aucs.bnsp)}};
  }
  nlohmann::json expl = nlohmann::json::object();
  for (const auto& m : methods) {
    expl[m.method] = {
        {"iou_f1", m.plausibility.iou_f1},
        {"token_f1", m.plausibility.token_f1},
        {"auprc", m.plausibility.auprc},
        {"comprehensiveness", m.faithfulness.comprehensiveness},
        {"sufficiency", m.faithfulness.sufficiency},
        {"plausibility_instances", m.plausibility.instances},
        {"faithfulness_instances", m.faithfulness.instances}};
  }
  return {{"performance",
           {{"accuracy", performance.accuracy},
            {"macro_f1", performance.macro_f1},
            {"auroc", opt(performance.auroc)}}},
          {"bias",
           {{"gmb_power", gmb_power},
            {"gmb_subgroup", opt(gmb_subgroup)},
            {"gmb_bpsn", opt(gmb_bpsn)},
            {"gmb_bnsp", opt(gmb_bnsp)},
            {"groups", groups_json}}},
          {"explainability", expl},
          {"notes", notes}};
}

std::string EvalReport::to_csv(std::string_view model) const {
  std::ostringstream out;
  out << "model,metric,value\n";
  auto row = [&](const std::string& metric, const std::optional<double>& v) {
    out << model << ',' << metric << ',' << fmt(v) << '\n';
  };
  row("accuracy", performance.accuracy);
  row("macro_f1", performance.macro_f1);
  row("auroc", performance.auroc);
  row("gmb_subgroup", gmb_subgroup);
  row("gmb_bpsn", gmb_bpsn);
  row("gmb_bnsp", gmb_bnsp);
  for (const auto& g : groups) {
    row("subgroup_auc/" + g.group, g.aucs.subgroup);
    row("bpsn_auc/" + g.group, g.aucs.bpsn);
    row("bnsp_auc/" + g.group, g.aucs.bnsp);
  }
  for (const auto& m : methods) {
    row(m.method + "/iou_f1", m.plausibility.iou_f1);
    row(m.method + "/token_f1", m.plausibility.token_f1);
    row(m.method + "/auprc", m.plausibility.auprc);
    row(m.method + "/comprehensiveness", m.faithfulness.comprehensiveness);
    row(m.method + "/sufficiency", m.faithfulness.sufficiency);
  }
  return out.str();
}

}  // namespace mrp::metrics
