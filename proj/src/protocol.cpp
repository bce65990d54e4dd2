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

#include "selftest/protocol.hpp"

#include <algorithm>
#include <numbers>
#include <cmath>
#include <stdexcept>

#include "selftest/builtin.hpp"

namespace selftest {

namespace {
constexpr std::uint64_t kOutcomeStream = ~std::uint64_t{0};
constexpr std::uint64_t kHistogramStream = ~std::uint64_t{0} - 1;

std::string bits_of(std::size_t value, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if ((value >> (n - 1 - i)) & 1U) s[i] = '1';
  }
  return s;
}

std::vector<Measurement> basis_measurements(Side side, std::size_t value, std::size_t n) {
  std::vector<Measurement> ms;
  for (std::size_t i = 0; i < n; ++i) {
    const bool one = (value >> (n - 1 - i)) & 1U;
    ms.push_back(Measurement{side, i, one ? kAnglePi2 : kAngle0});
  }
  return ms;
}
}  // namespace

std::string_view mode_name(Mode m) { return m == Mode::Exact ? "exact" : "sampled"; }

Mode parse_mode(std::string_view text) {
  if (text == "exact") return Mode::Exact;
  if (text == "sampled") return Mode::Sampled;
  throw std::invalid_argument("mode must be 'exact' or 'sampled'");
}

std::string Experiment::name() const {
  switch (kind) {
    case ExperimentKind::Conspiracy:
      return "C" + std::to_string(step);
    case ExperimentKind::Tomography:
      return "T" + std::to_string(step);
    case ExperimentKind::Computation:
      return "run";
  }
  return "?";
}

std::size_t ExperimentSchedule::record_count() const {
  std::size_t m = 0;
  for (const Experiment& e : experiments) m += e.settings.size();
  return m;
}

std::vector<Setting> epr_settings(std::size_t wire, const std::vector<GateRef>& prep) {
  std::vector<Setting> out;
  for (Angle a : kAllAngles) {
    for (Angle b : kAllAngles) {
      out.push_back(Setting{prep, {Measurement{Side::A, wire, a}, Measurement{Side::B, wire, b}}});
    }
  }
  return out;
}

namespace {

std::vector<GateRef> prep_through(const std::vector<IdealGate>& steps, std::size_t a_through,
                                  std::size_t b_through) {
  std::vector<GateRef> prep;
  for (std::size_t j = 0; j < a_through; ++j) prep.push_back(GateRef{steps[j].label, Side::A, steps[j].wires});
  for (std::size_t j = 0; j < b_through; ++j) prep.push_back(GateRef{steps[j].label, Side::B, steps[j].wires});
  return prep;
}

Experiment conspiracy_experiment(std::size_t step, std::vector<std::size_t> wires, std::vector<GateRef> prep) {
  Experiment e{ExperimentKind::Conspiracy, step, std::move(wires), std::move(prep), IdealContext::conspiracy(), {}};
  for (std::size_t w : e.wires) {
    std::vector<Setting> s = epr_settings(w, e.prep);
    e.settings.insert(e.settings.end(), s.begin(), s.end());
  }
  return e;
}

Experiment tomography_experiment(std::size_t step, const IdealGate& gate, std::vector<GateRef> prep) {
  Experiment e{ExperimentKind::Tomography, step, gate.wires, std::move(prep),
               IdealContext::tomography(gate.wires, gate.matrix), {}};
  const std::size_t k = gate.wires.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < 2 * k; ++i) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    Setting s{e.prep, {}};
    std::size_t rest = c;
    std::vector<Angle> digits(2 * k);
    for (std::size_t i = 2 * k; i-- > 0;) {
      digits[i] = kFrameAngles[rest % 3];
      rest /= 3;
    }
    for (std::size_t i = 0; i < k; ++i) s.measurements.push_back(Measurement{Side::A, gate.wires[i], digits[i]});
    for (std::size_t i = 0; i < k; ++i) s.measurements.push_back(Measurement{Side::B, gate.wires[i], digits[k + i]});
    e.settings.push_back(std::move(s));
  }
  return e;
}

}  // namespace

ExperimentSchedule build_schedule(const IdealCircuit& circuit, const std::vector<int>& x,
                                  const std::vector<int>& y) {
  if (x.size() != circuit.n || y.size() != circuit.n) {
    throw std::invalid_argument("x and y must both have one bit per wire (" + std::to_string(circuit.n) + ")");
  }
  ExperimentSchedule sch{circuit, x, y, {}, {}};
  for (std::size_t i = 0; i < circuit.n; ++i) {
    if (x[i] != y[i]) sch.steps.push_back(builtin_gate("NOT", {i}));
  }
  sch.steps.insert(sch.steps.end(), circuit.gates.begin(), circuit.gates.end());

  std::vector<std::size_t> all(circuit.n);
  for (std::size_t i = 0; i < circuit.n; ++i) all[i] = i;
  sch.experiments.push_back(conspiracy_experiment(0, all, {}));
  for (std::size_t j = 1; j <= sch.steps.size(); ++j) {
    const IdealGate& g = sch.steps[j - 1];
    sch.experiments.push_back(tomography_experiment(j, g, prep_through(sch.steps, j, j - 1)));
    sch.experiments.push_back(conspiracy_experiment(j, g.wires, prep_through(sch.steps, j, j)));
  }
  return sch;
}

RealMatrix circuit_unitary(std::size_t n, const std::vector<IdealGate>& gates) {
  const auto d = Eigen::Index{1} << n;
  const SubsystemDims layout(std::vector<std::size_t>(n, 2));
  Matrix u = Matrix::Identity(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    Vector col = u.col(c);
    for (const IdealGate& g : gates) apply_local(g.matrix, g.wires, layout, col);
    u.col(c) = col;
  }
  return u.real();
}

Verdict evaluate_schedule(const DeviceModel& device, const std::vector<Experiment>& experiments,
                          const TestOptions& options) {
  Verdict v;
  v.eps = options.eps;
  v.gamma = options.gamma;
  v.mode = options.mode;
  v.n_experiments = experiments.size();
  std::size_t m = 0;
  for (const Experiment& e : experiments) m += e.settings.size();
  if (options.mode == Mode::Sampled) v.samples_per_statistic = sample_size(options.eps, options.gamma, m, options.rule);

  std::uint64_t index = 0;
  for (const Experiment& e : experiments) {
    const PhysState prepared = prepare(device, e.prep);
    for (const Setting& s : e.settings) {
      s.validate();
      StatRecord r;
      r.setting = s;
      r.experiment = e.name();
      r.ideal_p = ideal_prob(e.ideal, s);
      const double p = measure_prob(device, prepared, s.measurements);
      if (options.mode == Mode::Sampled) {
        r.n_samples = v.samples_per_statistic;
        r.est_p = sample_prob(p, r.n_samples, options.seed, index);
      } else {
        r.est_p = p;
      }
      r.deviation = std::abs(r.est_p - r.ideal_p);
      v.n_total_samples += r.n_samples;
      v.max_deviation = std::max(v.max_deviation, r.deviation);
      if (r.deviation > options.eps) v.failing.push_back(r);
      v.records.push_back(std::move(r));
      ++index;
    }
  }
  v.accepted = v.failing.empty();
  return v;
}

Verdict epr_test(const DeviceModel& device, std::size_t wire, const TestOptions& options) {
  device.layout.subsystem(Side::A, wire);
  Experiment e{ExperimentKind::Conspiracy, 0, {wire}, {}, IdealContext::conspiracy(), epr_settings(wire)};
  return evaluate_schedule(device, {e}, options);
}

Verdict circuit_test(const DeviceModel& device, const IdealCircuit& circuit,
                     const std::vector<int>& x, const TestOptions& options) {
  circuit.validate();
  if (device.layout.n_wires < circuit.n) {
    throw std::invalid_argument("device has " + std::to_string(device.layout.n_wires) +
                                " wires, circuit needs " + std::to_string(circuit.n));
  }
  if (x.size() != circuit.n) throw std::invalid_argument("--x must have one bit per circuit wire");
  const std::size_t n = circuit.n;
  const std::size_t outcomes = std::size_t{1} << n;

  // steps 1-2: measure the B side in the computational basis once
  std::vector<double> b_probs(outcomes);
  for (std::size_t y = 0; y < outcomes; ++y) {
    b_probs[y] = measure_prob(device, device.source, basis_measurements(Side::B, y, n));
  }
  std::size_t y_value = 0;
  if (options.forced_y) {
    if (options.forced_y->size() != n) throw std::invalid_argument("--force-y must have one bit per circuit wire");
    for (int b : *options.forced_y) y_value = 2 * y_value + static_cast<std::size_t>(b);
  } else {
    y_value = sample_categorical(b_probs, options.seed, kOutcomeStream);
  }
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>((y_value >> (n - 1 - i)) & 1U);

  const ExperimentSchedule sch = build_schedule(circuit, x, y);
  Verdict v = evaluate_schedule(device, sch.experiments, options);
  v.y = y;

  // steps 3-5: run T_{x,y} on the collapsed A side
  PhysState state = device.source;
  for (const Measurement& m : basis_measurements(Side::B, y_value, n)) {
    const LocalOperator p = device.projector(m.side, m.wire, m.angle);
    apply_local(p.matrix, p.targets, state.layout, state.amplitudes);
  }
  if (b_probs[y_value] <= 1e-300 || state.amplitudes.norm() == 0.0) {
    v.notes.push_back("B outcome " + bits_to_string(y) + " has probability 0; computation skipped");
    return v;
  }
  state = state.normalized();
  for (const IdealGate& g : sch.steps) {
    const LocalOperator op = device.gate_operator(GateRef{g.label, Side::A, g.wires});
    apply_local(op.matrix, op.targets, state.layout, state.amplitudes);
  }
  std::vector<double> z_probs(outcomes);
  for (std::size_t z = 0; z < outcomes; ++z) {
    z_probs[z] = measure_prob(device, state, basis_measurements(Side::A, z, n));
  }
  std::vector<double> freq = z_probs;
  if (options.mode == Mode::Sampled) {
    freq = sample_frequencies(z_probs, v.samples_per_statistic, options.seed, kHistogramStream);
    v.n_total_samples += v.samples_per_statistic;
  }
  const RealMatrix t = circuit_unitary(n, circuit.gates);
  Eigen::Index x_index = 0;
  for (int b : x) x_index = 2 * x_index + b;
  double tv = 0.0;
  for (std::size_t z = 0; z < outcomes; ++z) {
    const double ideal = t(static_cast<Eigen::Index>(z), x_index) * t(static_cast<Eigen::Index>(z), x_index);
    const std::string key = bits_of(z, n);
    if (freq[z] > 0.0) v.histogram[key] = freq[z];
    if (ideal > 1e-15) v.ideal_histogram[key] = ideal;
    tv += std::abs(freq[z] - ideal);
  }
  v.tv_distance = 0.5 * tv;
  return v;
}

double check_simulation(const DeviceModel& device, const PhysState& state,
                        const IdealContext& ideal, const std::vector<Setting>& settings) {
  if (settings.empty()) throw std::invalid_argument("check_simulation needs at least one setting");
  double worst = 0.0;
  for (const Setting& s : settings) {
    worst = std::max(worst, std::abs(measure_prob(device, state, s.measurements) - ideal_prob(ideal, s)));
  }
  return worst;
}

Verdict input_prep_check(const DeviceModel& device, const IdealCircuit& circuit, double eps) {
  const std::size_t n = circuit.n;
  if (device.layout.n_wires < n) throw std::invalid_argument("device has fewer wires than the circuit");
  Verdict v;
  v.eps = eps;
  std::vector<std::size_t> candidates;
  const std::size_t outcomes = std::size_t{1} << n;
  if (n <= 3) {
    for (std::size_t y = 0; y < outcomes; ++y) candidates.push_back(y);
  } else {
    std::vector<double> probs(outcomes);
    for (std::size_t y = 0; y < outcomes; ++y) probs[y] = measure_prob(device, device.source, basis_measurements(Side::B, y, n));
    for (std::uint64_t k = 0; k < 8; ++k) candidates.push_back(sample_categorical(probs, 0, k));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }
  for (std::size_t y : candidates) {
    PhysState state = device.source;
    for (const Measurement& m : basis_measurements(Side::B, y, n)) {
      const LocalOperator p = device.projector(m.side, m.wire, m.angle);
      apply_local(p.matrix, p.targets, state.layout, state.amplitudes);
    }
    const std::string label = "input|" + bits_of(y, n);
    if (state.amplitudes.squaredNorm() < 1e-14) {
      v.notes.push_back("B outcome " + bits_of(y, n) + " has probability 0; skipped");
      continue;
    }
    state = state.normalized();
    auto add = [&](std::vector<Measurement> ms, double ideal) {
      StatRecord r;
      r.setting = Setting{{}, std::move(ms)};
      r.experiment = label;
      r.ideal_p = ideal;
      r.est_p = measure_prob(device, state, r.setting.measurements);
      r.deviation = std::abs(r.est_p - r.ideal_p);
      v.max_deviation = std::max(v.max_deviation, r.deviation);
      if (r.deviation > eps) v.failing.push_back(r);
      v.records.push_back(std::move(r));
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double bit_angle = ((y >> (n - 1 - i)) & 1U) ? std::numbers::pi / 2 : 0.0;
      for (Angle a : kAllAngles) {
        const double c = std::cos(a.radians() - bit_angle);
        add({Measurement{Side::A, i, a}}, c * c);
      }
    }
    for (std::size_t z = 0; z < outcomes; ++z) add(basis_measurements(Side::A, z, n), z == y ? 1.0 : 0.0);
  }
  v.accepted = v.failing.empty();
  return v;
}

double legacy_gate_check(const DeviceModel& device, const std::string& label, std::size_t wire,
                         std::size_t input, std::size_t repetitions) {
  const DeviceGate& g = device.gate(GateRef{label, Side::A, {wire}});
  const std::size_t d = device.layout.wire_dim(Side::A, wire);
  if (input >= d) throw std::invalid_argument("input basis index out of range");
  Vector state = Vector::Zero(static_cast<Eigen::Index>(d));
  state(static_cast<Eigen::Index>(input)) = 1.0;
  for (std::size_t r = 0; r < repetitions; ++r) state = g.unitary * state;
  const Matrix p0 = device.frame(Side::A, wire).projector(kAngle0);
  return std::real(state.dot(p0 * state));
}

}  // namespace selftest
