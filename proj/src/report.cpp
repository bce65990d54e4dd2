// Copyright 2026 The selftest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "selftest/report.hpp"

namespace selftest {

nlohmann::json setting_to_json(const Setting& setting) {
  nlohmann::json prep = nlohmann::json::array();
  for (const GateRef& g : setting.prep) {
    prep.push_back({{"label", g.label}, {"side", side_name(g.side)}, {"wires", g.wires}});
  }
  nlohmann::json meas = nlohmann::json::array();
  for (const Measurement& m : setting.measurements) {
    meas.push_back({{"side", side_name(m.side)}, {"wire", m.wire}, {"angle", m.angle.label()}});
  }
  return {{"prep", prep}, {"measurements", meas}};
}

nlohmann::json record_to_json(const StatRecord& r) {
  return {{"experiment", r.experiment},
          {"setting", r.setting.describe()},
          {"ideal", r.ideal_p},
          {"estimated", r.est_p},
          {"samples", r.n_samples},
          {"deviation", r.deviation}};
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json records = nlohmann::json::array();
  for (const StatRecord& r : v.records) records.push_back(record_to_json(r));
  nlohmann::json failing = nlohmann::json::array();
  for (const StatRecord& r : v.failing) failing.push_back(record_to_json(r));
  nlohmann::json j = {{"accepted", v.accepted},
                      {"max_deviation", v.max_deviation},
                      {"eps", v.eps},
                      {"gamma", v.gamma},
                      {"mode", mode_name(v.mode)},
                      {"experiments", v.n_experiments},
                      {"samples_per_statistic", v.samples_per_statistic},
                      {"total_samples", v.n_total_samples},
                      {"records", records},
                      {"failing", failing},
                      {"notes", v.notes}};
  if (!v.y.empty()) {
    j["y"] = bits_to_string(v.y);
    j["histogram"] = v.histogram;
    j["ideal_histogram"] = v.ideal_histogram;
    j["tv_distance"] = v.tv_distance;
  }
  return j;
}

nlohmann::json equivalence_to_json(const EquivalenceReport& r) {
  auto op_json = [](const LocalOperator& op) {
    return nlohmann::json{{"targets", op.targets}, {"matrix", matrix_to_json(op.matrix)}};
  };
  nlohmann::json ua = nlohmann::json::array();
  for (const LocalOperator& op : r.u_bar_a) ua.push_back(op_json(op));
  nlohmann::json ub = nlohmann::json::array();
  for (const LocalOperator& op : r.u_bar_b) ub.push_back(op_json(op));
  nlohmann::json proj = nlohmann::json::array();
  for (const ProjectorResidual& p : r.projector_residuals) {
    proj.push_back({{"side", side_name(p.side)}, {"wire", p.wire}, {"angle", p.angle.label()}, {"residual", p.residual}});
  }
  nlohmann::json j = {{"wires", r.wires},
                      {"extended_layout", r.extended_layout.dims()},
                      {"u_bar_a", ua},
                      {"u_bar_b", ub},
                      {"s_rank", r.s_basis.rank},
                      {"s_generators", r.s_generators},
                      {"s_singular_values", r.s_singular_values},
                      {"state_residual", r.state_residual},
                      {"chi_norm", r.chi_norm},
                      {"projector_residuals", proj},
                      {"max_projector_residual", r.max_projector_residual},
                      {"max_residual", r.max_residual()}};
  if (r.gate_label) {
    j["gate_label"] = *r.gate_label;
    j["gate_residual"] = r.gate_residual.value_or(2.0);
    j["factor_residual"] = r.factor_residual.value_or(2.0);
    j["post_state_residual"] = r.post_state_residual.value_or(0.0);
    j["w_rank"] = r.w_rank;
  }
  return j;
}

}  // namespace selftest
