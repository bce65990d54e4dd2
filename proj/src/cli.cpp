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


#include "selftest/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "selftest/builtin.hpp"
#include "selftest/report.hpp"
#include "selftest/version.hpp"

namespace selftest {

void RunConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("--eps: must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("--gamma: must lie in (0, 1)");
  if (mode != "exact" && mode != "sampled") throw ConfigError("--mode: must be 'exact' or 'sampled'");
  if (mode == "sampled" && !seed) throw ConfigError("--seed: required in sampled mode");
  if (gate_index && *gate_index < 1) throw ConfigError("--gate-index: must be at least 1");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"command", command}, {"device", device}, {"circuit", circuit}, {"x", x},
                      {"eps", eps},         {"gamma", gamma},   {"mode", mode},       {"out", out},
                      {"force_y", force_y}};
  j["wire"] = wire ? nlohmann::json(*wire) : nlohmann::json(nullptr);
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["gate_index"] = gate_index ? nlohmann::json(*gate_index) : nlohmann::json(nullptr);
  return j;
}

IdealCircuit resolve_circuit(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) {
    const std::string name = spec.substr(8);
    if (name == "figure1") return figure_one_circuit();
    if (name == "bell") return bell_prep_circuit();
    std::size_t arity = 0;
    try {
      arity = builtin_gate_arity(name);
    } catch (const std::exception&) {
      throw ConfigError("--circuit: unknown builtin circuit '" + name + "'");
    }
    std::vector<std::size_t> wires(arity);
    for (std::size_t i = 0; i < arity; ++i) wires[i] = i;
    return single_gate_circuit(name, arity, wires);
  }
  return load_circuit(spec);
}

DeviceModel resolve_device(const std::string& spec, const IdealCircuit& circuit) {
  if (is_builtin_uri(spec)) {
    try {
      return resolve_builtin_device(spec, circuit);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return load_device(spec);
}

namespace {

struct Row {
  std::string experiment;
  std::string setting;
  double ideal = 0.0;
  double estimated = 0.0;
  double deviation = 0.0;
  bool pass = true;
};

void print_table(std::ostream& out, const std::vector<Row>& rows) {
  std::size_t we = 10;
  std::size_t ws = 7;
  for (const Row& r : rows) {
    we = std::max(we, r.experiment.size());
    ws = std::max(ws, r.setting.size());
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-*s  %14s  %14s  %12s  %s\n", static_cast<int>(we), "experiment",
                static_cast<int>(ws), "setting", "ideal", "estimated", "deviation", "pass");
  out << buf;
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-*s  %14.10f  %14.10f  %12.3e  %s\n", static_cast<int>(we),
                  r.experiment.c_str(), static_cast<int>(ws), r.setting.c_str(), r.ideal, r.estimated,
                  r.deviation, r.pass ? "yes" : "NO");
    out << buf;
  }
}

std::vector<Row> verdict_rows(const Verdict& v) {
  std::vector<Row> rows;
  for (const StatRecord& r : v.records) {
    rows.push_back(Row{r.experiment, r.setting.describe(), r.ideal_p, r.est_p, r.deviation, r.deviation <= v.eps});
  }
  return rows;
}

TestOptions options_from(const RunConfig& cfg) {
  TestOptions o;
  o.eps = cfg.eps;
  o.gamma = cfg.gamma;
  o.seed = cfg.seed.value_or(0);
  o.mode = parse_mode(cfg.mode);
  return o;
}

IdealCircuit circuit_or_default(const RunConfig& cfg, std::size_t min_wires) {
  if (!cfg.circuit.empty()) return resolve_circuit(cfg.circuit);
  IdealCircuit c;
  c.n = std::max<std::size_t>(1, min_wires);
  c.input.assign(c.n, 0);
  return c;
}

std::vector<int> input_bits(const RunConfig& cfg, const IdealCircuit& circuit) {
  if (cfg.x.empty()) return circuit.input.empty() ? std::vector<int>(circuit.n, 0) : circuit.input;
  try {
    return parse_bits(cfg.x, circuit.n);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--x: ") + e.what());
  }
}

void print_verdict_summary(std::ostream& out, const Verdict& v) {
  out << "\nverdict: " << (v.accepted ? "ACCEPT" : "REJECT") << "  max_deviation=" << v.max_deviation
      << "  eps=" << v.eps << "  experiments=" << v.n_experiments << "  records=" << v.records.size()
      << "  failing=" << v.failing.size() << '\n';
  if (v.mode == Mode::Sampled) {
    out << "samples per statistic: " << v.samples_per_statistic << "  total samples: " << v.n_total_samples << '\n';
  }
  if (!v.y.empty()) {
    out << "B outcome y=" << bits_to_string(v.y) << "  computation histogram:";
    for (const auto& [k, p] : v.histogram) out << ' ' << k << '=' << p;
    out << "  tv_distance=" << v.tv_distance << '\n';
  }
  for (const std::string& n : v.notes) out << "note: " << n << '\n';
}

struct Outcome {
  bool accepted = false;
  nlohmann::json body;
};

Outcome run_epr(const RunConfig& cfg, std::ostream& out) {
  const std::size_t wire = cfg.wire.value_or(0);
  const IdealCircuit circuit = circuit_or_default(cfg, wire + 1);
  const DeviceModel device = resolve_device(cfg.device, circuit);
  if (wire >= device.layout.n_wires) {
    throw ConfigError("--wire: must be below the device's " + std::to_string(device.layout.n_wires) + " wires");
  }
  const Verdict v = epr_test(device, wire, options_from(cfg));
  print_table(out, verdict_rows(v));
  print_verdict_summary(out, v);
  return {v.accepted, verdict_to_json(v)};
}

Outcome run_circuit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.circuit.empty()) throw ConfigError("--circuit: required for circuit-test");
  const IdealCircuit circuit = resolve_circuit(cfg.circuit);
  const DeviceModel device = resolve_device(cfg.device, circuit);
  TestOptions o = options_from(cfg);
  if (!cfg.force_y.empty()) {
    try {
      o.forced_y = parse_bits(cfg.force_y, circuit.n);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--force-y: ") + e.what());
    }
  }
  const Verdict v = circuit_test(device, circuit, input_bits(cfg, circuit), o);
  print_table(out, verdict_rows(v));
  print_verdict_summary(out, v);
  return {v.accepted, verdict_to_json(v)};
}

Outcome run_extract(const RunConfig& cfg, std::ostream& out) {
  const IdealCircuit circuit = circuit_or_default(cfg, cfg.wire.value_or(0) + 1);
  const DeviceModel device = resolve_device(cfg.device, circuit);
  EquivalenceReport rep;
  std::string name;
  if (cfg.gate_index) {
    if (cfg.circuit.empty()) throw ConfigError("--circuit: required with --gate-index");
    if (*cfg.gate_index > circuit.gates.size()) {
      throw ConfigError("--gate-index: must lie in 1.." + std::to_string(circuit.gates.size()));
    }
    rep = certify_gate_equivalence(device, circuit, *cfg.gate_index);
    name = "gate" + std::to_string(*cfg.gate_index);
  } else {
    std::vector<std::size_t> wires;
    if (cfg.wire) {
      if (*cfg.wire >= device.layout.n_wires) throw ConfigError("--wire: outside the device's wires");
      wires.push_back(*cfg.wire);
    } else {
      for (std::size_t w = 0; w < std::min<std::size_t>(device.layout.n_wires, 3); ++w) wires.push_back(w);
    }
    rep = certify_state_equivalence(device, device.source, wires);
    name = "state";
  }
  std::vector<Row> rows;
  rows.push_back(Row{name, "state", 0.0, rep.state_residual, rep.state_residual, rep.state_residual <= cfg.eps});
  for (const ProjectorResidual& p : rep.projector_residuals) {
    rows.push_back(Row{name, std::string(side_name(p.side)) + std::to_string(p.wire) + "=" + p.angle.label(), 0.0,
                       p.residual, p.residual, p.residual <= cfg.eps});
  }
  if (rep.gate_residual) {
    rows.push_back(Row{name, "gate " + rep.gate_label.value_or(""), 0.0, *rep.gate_residual, *rep.gate_residual,
                       *rep.gate_residual <= cfg.eps});
  }
  print_table(out, rows);
  const bool ok = rep.max_residual() <= cfg.eps;
  out << "\nS rank " << rep.s_basis.rank << " from " << rep.s_generators << " generators; max residual "
      << rep.max_residual() << (ok ? " (within eps)" : " (exceeds eps)") << '\n';
  return {ok, equivalence_to_json(rep)};
}

Outcome run_tomo(const RunConfig& cfg, std::ostream& out) {
  if (cfg.circuit.empty()) throw ConfigError("--circuit: required for tomo");
  const IdealCircuit circuit = resolve_circuit(cfg.circuit);
  const DeviceModel device = resolve_device(cfg.device, circuit);
  const std::size_t j = cfg.gate_index.value_or(1);
  if (j > circuit.gates.size()) {
    throw ConfigError("--gate-index: must lie in 1.." + std::to_string(circuit.gates.size()));
  }
  const std::vector<int> x = input_bits(cfg, circuit);
  const ExperimentSchedule sch = build_schedule(circuit, x, x);
  const auto it = std::find_if(sch.experiments.begin(), sch.experiments.end(), [&](const Experiment& e) {
    return e.kind == ExperimentKind::Tomography && e.step == j;
  });
  if (it == sch.experiments.end()) throw ConfigError("--gate-index: no tomography experiment for this step");
  const IdealGate& gate = sch.steps[j - 1];
  const std::size_t k = it->wires.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < k; ++i) combos *= 3;
  auto digits = [&](std::size_t c) {
    std::vector<Angle> a(k);
    for (std::size_t i = k; i-- > 0;) {
      a[i] = kTomographyAngles[c % 3];
      c /= 3;
    }
    return a;
  };

  Experiment e = *it;
  e.settings.clear();
  for (std::size_t b = 0; b < combos; ++b) {
    for (std::size_t a = 0; a < combos; ++a) {
      Setting s{e.prep, {}};
      const auto aa = digits(a);
      const auto bb = digits(b);
      for (std::size_t i = 0; i < k; ++i) s.measurements.push_back(Measurement{Side::A, e.wires[i], aa[i]});
      for (std::size_t i = 0; i < k; ++i) s.measurements.push_back(Measurement{Side::B, e.wires[i], bb[i]});
      e.settings.push_back(std::move(s));
    }
  }
  const Verdict v = evaluate_schedule(device, {e}, options_from(cfg));

  std::vector<Row> rows;
  nlohmann::json recon = nlohmann::json::array();
  bool ok = true;
  const double scale = static_cast<double>(std::size_t{1} << k);
  for (std::size_t b = 0; b < combos; ++b) {
    std::map<std::vector<Angle>, double> stats;
    for (std::size_t a = 0; a < combos; ++a) stats[digits(a)] = scale * v.records[b * combos + a].est_p;
    const Matrix rho = tomo_reconstruct(stats, k);
    const auto bb = digits(b);
    Vector psi = Vector::Ones(1);
    for (Angle ang : bb) psi = kron(psi, angle_state(ang.radians()).amplitudes).eval();
    psi = gate.matrix.cast<Complex>() * psi;
    const Matrix ideal = psi * psi.adjoint();
    Eigen::JacobiSVD<Matrix> svd(rho - ideal);
    const double err = svd.singularValues()(0);
    const double fidelity = psi.dot(rho * psi).real();
    std::string label;
    for (std::size_t i = 0; i < k; ++i) {
      label += (i ? " " : "") + std::string("B") + std::to_string(e.wires[i]) + "=" + bb[i].label();
    }
    rows.push_back(Row{e.name(), label, 1.0, fidelity, err, err <= cfg.eps});
    ok = ok && err <= cfg.eps;
    recon.push_back({{"setting", label}, {"rho", matrix_to_json(rho)}, {"ideal", matrix_to_json(ideal)},
                     {"error", err}, {"fidelity", fidelity}});
  }
  print_table(out, rows);
  out << "\ntomography of gate " << j << " (" << gate.label << "): " << (ok ? "within eps" : "exceeds eps")
      << "; statistics max_deviation=" << v.max_deviation << '\n';
  nlohmann::json body = verdict_to_json(v);
  body["reconstructions"] = recon;
  body["gate_index"] = j;
  body["gate_label"] = gate.label;
  return {ok, body};
}

Outcome run_gallery(std::ostream& out) {
  nlohmann::json list = nlohmann::json::array();
  for (const GalleryEntry& g : builtin_gallery()) {
    out << g.uri << "  " << g.description << '\n';
    list.push_back({{"uri", g.uri}, {"description", g.description}});
  }
  return {true, {{"devices", list}}};
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Self-testing harness for simulated quantum devices", "selftest"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* sub, bool needs_circuit) {
    sub->add_option("--device", cfg.device, "device JSON file or builtin URI")->required();
    sub->add_option("--circuit", cfg.circuit, "circuit JSON file or builtin:figure1|bell|<GATE>")
        ->required(needs_circuit);
    sub->add_option("--eps", cfg.eps, "additive error tolerance in (0, 1)");
    sub->add_option("--gamma", cfg.gamma, "failure probability in (0, 1)");
    sub->add_option("--seed", cfg.seed, "64-bit master seed (required in sampled mode)");
    sub->add_option("--mode", cfg.mode, "exact or sampled");
    sub->add_option("--out", cfg.out, "write the JSON report here");
  };
  CLI::App* epr = app.add_subcommand("epr-test", "36-setting EPR test on one wire pair");
  common(epr, false);
  epr->add_option("--wire", cfg.wire, "wire index");
  CLI::App* circ = app.add_subcommand("circuit-test", "full circuit test with verdict and computation run");
  common(circ, true);
  circ->add_option("--x", cfg.x, "input bit string");
  circ->add_option("--force-y", cfg.force_y, "fix the B-side outcome instead of sampling it");
  CLI::App* ext = app.add_subcommand("extract", "state or gate equivalence residuals");
  common(ext, false);
  ext->add_option("--wire", cfg.wire, "certify the source on this wire only");
  ext->add_option("--gate-index", cfg.gate_index, "certify this circuit step (1-based)");
  CLI::App* tomo = app.add_subcommand("tomo", "reconstruct the gate's action from tomography statistics");
  common(tomo, true);
  tomo->add_option("--x", cfg.x, "input bit string");
  tomo->add_option("--gate-index", cfg.gate_index, "circuit step (1-based, default 1)");
  CLI::App* gal = app.add_subcommand("gallery", "list builtin devices");
  gal->add_option("--out", cfg.out, "write the list as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (CLI::App* sub : {epr, circ, ext, tomo, gal}) {
      if (sub->parsed()) cfg.command = sub->get_name();
    }
    cfg.validate();
    Outcome result;
    if (cfg.command == "epr-test") {
      result = run_epr(cfg, out);
    } else if (cfg.command == "circuit-test") {
      result = run_circuit(cfg, out);
    } else if (cfg.command == "extract") {
      result = run_extract(cfg, out);
    } else if (cfg.command == "tomo") {
      result = run_tomo(cfg, out);
    } else {
      result = run_gallery(out);
    }
    if (!cfg.out.empty()) {
      nlohmann::json report = {{"tool", "selftest"}, {"version", kVersion}, {"config", cfg.to_json()}};
      report["result"] = std::move(result.body);
      report["accepted"] = result.accepted;
      save_json(report, cfg.out);
    }
    return result.accepted ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace selftest
