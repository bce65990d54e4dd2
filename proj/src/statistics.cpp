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

#include "selftest/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace selftest {

std::string Setting::describe() const {
  std::string s;
  for (const Measurement& m : measurements) {
    if (!s.empty()) s += ' ';
    s += std::string(side_name(m.side)) + std::to_string(m.wire) + "=" + m.angle.label();
  }
  return s;
}

void Setting::validate() const {
  std::set<std::pair<int, std::size_t>> seen;
  for (const Measurement& m : measurements) {
    if (!seen.emplace(static_cast<int>(m.side), m.wire).second) {
      throw std::invalid_argument("setting measures side " + std::string(side_name(m.side)) + " wire " +
                                  std::to_string(m.wire) + " twice");
    }
    if (m.angle.base().eighths() > 2) {
      throw std::invalid_argument("setting angle " + m.angle.label() + " is outside the frame angles");
    }
  }
}

PhysState prepare(const DeviceModel& device, const std::vector<GateRef>& prep) {
  PhysState state = device.source;
  for (const GateRef& ref : prep) {
    const LocalOperator op = device.gate_operator(ref);
    apply_local(op.matrix, op.targets, state.layout, state.amplitudes);
  }
  return state;
}

double measure_prob(const DeviceModel& device, const PhysState& state,
                    const std::vector<Measurement>& measurements) {
  PhysState x = state;
  for (const Measurement& m : measurements) {
    const LocalOperator p = device.projector(m.side, m.wire, m.angle);
    apply_local(p.matrix, p.targets, x.layout, x.amplitudes);
  }
  return x.amplitudes.squaredNorm();
}

double exact_prob(const DeviceModel& device, const Setting& setting) {
  setting.validate();
  return measure_prob(device, prepare(device, setting.prep), setting.measurements);
}

std::string_view experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Conspiracy:
      return "conspiracy";
    case ExperimentKind::Tomography:
      return "tomography";
    case ExperimentKind::Computation:
      return "computation";
  }
  return "?";
}

IdealContext IdealContext::conspiracy() { return IdealContext{ExperimentKind::Conspiracy, {}, {}, {}}; }

IdealContext IdealContext::tomography(std::vector<std::size_t> wires, RealMatrix t) {
  return IdealContext{ExperimentKind::Tomography, std::move(wires), std::move(t), {}};
}

IdealContext IdealContext::computation(std::size_t n, RealMatrix t, std::vector<int> input) {
  std::vector<std::size_t> wires(n);
  for (std::size_t i = 0; i < n; ++i) wires[i] = i;
  return IdealContext{ExperimentKind::Computation, std::move(wires), std::move(t), std::move(input)};
}

namespace {

std::size_t position_of(const std::vector<std::size_t>& wires, std::size_t w) {
  const auto it = std::find(wires.begin(), wires.end(), w);
  if (it == wires.end()) {
    throw std::invalid_argument("setting measures wire " + std::to_string(w) + " outside the ideal context");
  }
  return static_cast<std::size_t>(it - wires.begin());
}

double conspiracy_prob(const Setting& setting) {
  std::map<std::size_t, std::pair<const Measurement*, const Measurement*>> by_wire;
  for (const Measurement& m : setting.measurements) {
    auto& slot = by_wire[m.wire];
    (m.side == Side::A ? slot.first : slot.second) = &m;
  }
  double p = 1.0;
  for (const auto& [wire, pair] : by_wire) {
    if (pair.first && pair.second) {
      const double c = std::cos(pair.first->angle.radians() - pair.second->angle.radians());
      p *= 0.5 * c * c;
    } else {
      p *= 0.5;
    }
  }
  return p;
}

double tomography_prob(const IdealContext& ctx, const Setting& setting) {
  const std::size_t k = ctx.wires.size();
  const auto d = Eigen::Index{1} << k;
  if (ctx.t.rows() != d || ctx.t.cols() != d) throw std::invalid_argument("tomography gate has the wrong size");
  // (T (x) Id) sum_x |x>|x> / sqrt(2^k), amplitude matrix M(a, b) = T(a, b) / sqrt(2^k)
  Vector amps(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) amps(a * d + b) = ctx.t(a, b) / std::sqrt(static_cast<double>(d));
  }
  const SubsystemDims layout(std::vector<std::size_t>(2 * k, 2));
  for (const Measurement& m : setting.measurements) {
    const std::size_t pos = position_of(ctx.wires, m.wire) + (m.side == Side::B ? k : 0);
    apply_local(projector_matrix(m.angle.radians()), std::vector<std::size_t>{pos}, layout, amps);
  }
  return amps.squaredNorm();
}

double computation_prob(const IdealContext& ctx, const Setting& setting) {
  const std::size_t n = ctx.wires.size();
  const auto d = Eigen::Index{1} << n;
  if (ctx.t.rows() != d || ctx.input.size() != n) throw std::invalid_argument("computation context is malformed");
  Eigen::Index x = 0;
  for (int b : ctx.input) x = 2 * x + b;
  Vector amps = ctx.t.col(x).cast<Complex>();
  const SubsystemDims layout(std::vector<std::size_t>(n, 2));
  for (const Measurement& m : setting.measurements) {
    if (m.side != Side::A) throw std::invalid_argument("computation settings measure the A side only");
    apply_local(projector_matrix(m.angle.radians()), std::vector<std::size_t>{position_of(ctx.wires, m.wire)},
                layout, amps);
  }
  return amps.squaredNorm();
}

}  // namespace

double ideal_prob(const IdealContext& ctx, const Setting& setting) {
  setting.validate();
  switch (ctx.kind) {
    case ExperimentKind::Conspiracy:
      return conspiracy_prob(setting);
    case ExperimentKind::Tomography:
      return tomography_prob(ctx, setting);
    case ExperimentKind::Computation:
      return computation_prob(ctx, setting);
  }
  throw std::invalid_argument("unclassifiable setting");
}

std::size_t sample_size(double eps, double gamma, std::size_t m, SampleSizeRule rule) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (m < 1) throw std::invalid_argument("the number of statistics must be at least 1");
  const double log_term = std::log(2.0 * static_cast<double>(m) / gamma);
  const double denom = rule == SampleSizeRule::Hoeffding ? 2.0 * eps * eps : 2.0 * eps;
  // guard against ceil landing one above an exact integer through rounding
  const double raw = log_term / denom;
  const double nearest = std::round(raw);
  const double n = std::abs(raw - nearest) < 1e-9 * std::max(1.0, raw) ? nearest : std::ceil(raw);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(master ^ splitmix(index + 0x632be59bd9b4e019ULL));
}

namespace {

// Probabilities that agree to rounding error must draw identical samples;
// the binomial sampler branches on p, so snap to a fixed grid first.
double snap(double p) { return std::round(p * 1e12) / 1e12; }

std::vector<double> snapped_weights(const std::vector<double>& probs) {
  std::vector<double> w(probs);
  for (double& x : w) x = std::max(0.0, snap(x));
  return w;
}

}  // namespace

double sample_prob(double p, std::size_t n, std::uint64_t master_seed, std::uint64_t index) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  p = snap(p);
  if (p >= 1.0) return 1.0;
  if (p <= 0.0) return 0.0;
  std::mt19937_64 rng(derive_seed(master_seed, index));
  std::binomial_distribution<std::size_t> dist(n, p);
  return static_cast<double>(dist(rng)) / static_cast<double>(n);
}

double sample_prob(const DeviceModel& device, const Setting& setting, std::size_t n,
                   std::uint64_t master_seed, std::uint64_t index) {
  return sample_prob(exact_prob(device, setting), n, master_seed, index);
}

std::size_t sample_categorical(const std::vector<double>& probs, std::uint64_t master_seed,
                               std::uint64_t index) {
  std::mt19937_64 rng(derive_seed(master_seed, index));
  const std::vector<double> w = snapped_weights(probs);
  std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
  return dist(rng);
}

std::vector<double> sample_frequencies(const std::vector<double>& probs, std::size_t n,
                                       std::uint64_t master_seed, std::uint64_t index) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  std::mt19937_64 rng(derive_seed(master_seed, index));
  const std::vector<double> w = snapped_weights(probs);
  std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
  std::vector<double> freq(probs.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) freq[dist(rng)] += 1.0;
  for (double& f : freq) f /= static_cast<double>(n);
  return freq;
}

}  // namespace selftest
