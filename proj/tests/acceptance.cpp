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


// Acceptance criteria A1-A9. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "selftest/builtin.hpp"
#include "selftest/extraction.hpp"

namespace selftest {
namespace {

using oracle::kPi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

TestOptions exact_options(double eps = 0.1) {
  TestOptions o;
  o.eps = eps;
  return o;
}

// A1 -------------------------------------------------------------------------
void criterion_a1(Outcome& out) {
  const Stopwatch sw;
  const Verdict v = epr_test(resolve_builtin_device("builtin:honest", single_gate_circuit("H")), 0, exact_options());
  double worst = 0.0;
  for (const StatRecord& r : v.records) {
    const double a = r.setting.measurements[0].angle.radians();
    const double b = r.setting.measurements[1].angle.radians();
    worst = std::max(worst, std::abs(r.est_p - oracle::epr_joint(a, b)));
  }
  const double t = sw.seconds();
  out.require(v.records.size() == 36, "36 settings");
  out.require(v.accepted, "accepted");
  out.require(worst <= 1e-12, "|p - cos^2/2| <= 1e-12");
  out.require(t < 1.0, "runtime < 1 s");
  out.detail << "records=" << v.records.size() << " max|p-ideal|=" << worst << " time=" << t << "s";
}

// A2 -------------------------------------------------------------------------
void criterion_a2(Outcome& out) {
  const Stopwatch sw;
  for (const auto& [name, circuit] :
       std::vector<std::pair<std::string, IdealCircuit>>{{"figure1", figure_one_circuit()}, {"bell", bell_prep_circuit()}}) {
    const DeviceModel d = resolve_builtin_device("builtin:honest", circuit);
    const std::vector<int> x(circuit.n, 0);
    const Verdict exact = circuit_test(d, circuit, x, exact_options());
    out.require(exact.accepted && exact.max_deviation <= 1e-12, name + " exact accept, max_deviation <= 1e-12");
    TestOptions o;
    o.mode = Mode::Sampled;
    o.eps = 0.1;
    o.gamma = 0.05;
    int accepted = 0;
    double worst_tv = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      o.seed = seed;
      const Verdict v = circuit_test(d, circuit, x, o);
      accepted += v.accepted;
      worst_tv = std::max(worst_tv, v.tv_distance);
    }
    out.require(accepted >= 95, name + " sampled acceptance >= 95/100");
    out.require(worst_tv <= 3 * o.eps, name + " tv <= 3 eps");
    out.detail << name << ": exact max_dev=" << exact.max_deviation << " sampled accepted=" << accepted
               << "/100 max_tv=" << worst_tv << "; ";
  }
  const double t = sw.seconds();
  out.require(t < 120.0, "runtime < 2 min");
  out.detail << "time=" << t << "s";
}

// A3 -------------------------------------------------------------------------
struct Golden {
  const char* experiment;
  const char* setting;
  double estimated;
};

// failing records for the single-H circuit with y = 0 at eps = 0.05
const std::vector<Golden>& van_dam_goldens() {
  static const std::vector<Golden> g = {
    {"C0", "A0=pi/8 B0=pi/8", 3.0 / 8},
    {"C0", "A0=pi/8 B0=pi/4", 1.0 / 4},
    {"C0", "A0=pi/8 B0=5pi/8", 1.0 / 8},
    {"C0", "A0=pi/8 B0=3pi/4", 1.0 / 4},
    {"C0", "A0=pi/4 B0=pi/8", 1.0 / 4},
    {"C0", "A0=pi/4 B0=pi/4", 1.0 / 4},
    {"C0", "A0=pi/4 B0=5pi/8", 1.0 / 4},
    {"C0", "A0=pi/4 B0=3pi/4", 1.0 / 4},
    {"C0", "A0=5pi/8 B0=pi/8", 1.0 / 8},
    {"C0", "A0=5pi/8 B0=pi/4", 1.0 / 4},
    {"C0", "A0=5pi/8 B0=5pi/8", 3.0 / 8},
    {"C0", "A0=5pi/8 B0=3pi/4", 1.0 / 4},
    {"C0", "A0=3pi/4 B0=pi/8", 1.0 / 4},
    {"C0", "A0=3pi/4 B0=pi/4", 1.0 / 4},
    {"C0", "A0=3pi/4 B0=5pi/8", 1.0 / 4},
    {"C0", "A0=3pi/4 B0=3pi/4", 1.0 / 4},
    {"T1", "A0=pi/8 B0=pi/8", 3.0 / 8},
    {"T1", "A0=pi/8 B0=pi/4", 1.0 / 4},
    {"T1", "A0=pi/4 B0=0", 1.0 / 4},
    {"T1", "A0=pi/4 B0=pi/8", 1.0 / 4},
    {"C1", "A0=pi/8 B0=0", 1.0 / 4},
    {"C1", "A0=pi/8 B0=pi/8", 3.0 / 8},
    {"C1", "A0=pi/8 B0=pi/2", 1.0 / 4},
    {"C1", "A0=pi/8 B0=5pi/8", 1.0 / 8},
    {"C1", "A0=pi/4 B0=pi/8", 1.0 / 4},
    {"C1", "A0=pi/4 B0=pi/4", 1.0 / 4},
    {"C1", "A0=pi/4 B0=5pi/8", 1.0 / 4},
    {"C1", "A0=pi/4 B0=3pi/4", 1.0 / 4},
    {"C1", "A0=5pi/8 B0=0", 1.0 / 4},
    {"C1", "A0=5pi/8 B0=pi/8", 1.0 / 8},
    {"C1", "A0=5pi/8 B0=pi/2", 1.0 / 4},
    {"C1", "A0=5pi/8 B0=5pi/8", 3.0 / 8},
    {"C1", "A0=3pi/4 B0=pi/8", 1.0 / 4},
    {"C1", "A0=3pi/4 B0=pi/4", 1.0 / 4},
    {"C1", "A0=3pi/4 B0=5pi/8", 1.0 / 4},
    {"C1", "A0=3pi/4 B0=3pi/4", 1.0 / 4},
  };
  return g;
}

void criterion_a3(Outcome& out) {
  const IdealCircuit h = single_gate_circuit("H");
  const DeviceModel d = resolve_builtin_device("builtin:vandam", h);
  const double one = legacy_gate_check(d, "H", 0, 0, 1);
  const double two = legacy_gate_check(d, "H", 0, 0, 2);
  out.require(std::abs(one - 0.5) <= 1e-12, "legacy check: P(0) = 1/2 after one H");
  out.require(std::abs(two - 1.0) <= 1e-12, "legacy check: P(0) = 1 after two H");

  TestOptions o = exact_options(0.05);
  const Verdict sampled_y = circuit_test(d, h, {0}, o);
  out.require(!sampled_y.accepted, "rejected (drawn y)");
  o.forced_y = std::vector<int>{0};
  const Verdict v = circuit_test(d, h, {0}, o);
  out.require(!v.accepted, "rejected (y = 0)");
  const auto& goldens = van_dam_goldens();
  out.require(v.failing.size() == goldens.size(), "failing record count matches goldens");
  std::size_t matched = 0;
  for (std::size_t i = 0; i < std::min(goldens.size(), v.failing.size()); ++i) {
    const StatRecord& r = v.failing[i];
    matched += r.experiment == goldens[i].experiment && r.setting.describe() == goldens[i].setting &&
               std::abs(r.est_p - goldens[i].estimated) <= 1e-12;
  }
  out.require(matched == goldens.size(), "failing records match goldens");
  out.detail << "legacy P(0)=" << one << "," << two << " failing=" << v.failing.size() << " matched=" << matched
             << " max_dev=" << v.max_deviation;
}

// A4 -------------------------------------------------------------------------
void criterion_a4(Outcome& out) {
  const Stopwatch sw;
  const IdealCircuit h = single_gate_circuit("H");
  std::vector<double> eps;
  std::vector<double> residual;
  for (double p : {1e-4, 1e-3, 1e-2}) {
    std::ostringstream uri;
    uri << "builtin:depolarized?p=" << p;
    const DeviceModel d = resolve_builtin_device(uri.str(), h);
    const double e = epr_test(d, 0, exact_options()).max_deviation;
    out.require(std::abs(e - p / 4) <= 1e-12, "EPR deviation = p/4");
    eps.push_back(e);
    residual.push_back(certify_state_equivalence(d, d.source, {0}).max_residual());
  }
  const double c = residual[0] / std::pow(eps[0], 0.25);
  for (std::size_t i = 1; i < eps.size(); ++i) {
    const double bound = c * std::pow(eps[i], 0.25);
    std::ostringstream what;
    what << "residual(eps=" << eps[i] << ")=" << residual[i] << " <= C eps^1/4=" << bound;
    out.require(residual[i] <= bound * (1 + 1e-12), what.str());
  }
  const double slope = std::log(residual[2] / residual[0]) / std::log(eps[2] / eps[0]);
  const double t = sw.seconds();
  out.require(t < 60.0, "runtime < 1 min");
  out.detail << "C=" << c << " residuals=" << residual[0] << "," << residual[1] << "," << residual[2]
             << " measured exponent=" << slope << " time=" << t << "s";
}

// A5 -------------------------------------------------------------------------
std::map<std::vector<Angle>, double> tomography_stats(const Matrix& rho, std::size_t n) {
  std::map<std::vector<Angle>, double> out;
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<Angle> key(n);
    std::vector<double> rad(n);
    std::size_t r = c;
    for (std::size_t i = n; i-- > 0;) {
      key[i] = kTomographyAngles[r % 3];
      rad[i] = key[i].radians();
      r /= 3;
    }
    out[key] = oracle::angle_prob(rho, rad);
  }
  return out;
}

void criterion_a5(Outcome& out) {
  std::mt19937_64 rng(2026);
  double worst_exact = 0.0;
  for (std::size_t n : {1u, 2u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vector g = oracle::random_real_unit(1 << n, rng).cast<Complex>();
      const Matrix rho = g * g.adjoint();
      worst_exact = std::max(worst_exact, oracle::opnorm(tomo_reconstruct(tomography_stats(rho, n), n) - rho));
    }
  }
  out.require(worst_exact <= 1e-10, "exact reconstruction <= 1e-10");

  const Matrix target = oracle::proj(kPi / 8);
  std::vector<double> errors;
  const std::vector<double> levels{1e-6, 1e-4};
  for (double eps : levels) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      auto stats = tomography_stats(target, 1);
      std::uniform_real_distribution<double> u(-eps, eps);
      for (auto& [k, p] : stats) p += u(rng);
      worst = std::max(worst, oracle::opnorm(tomo_reconstruct(stats, 1) - target));
    }
    errors.push_back(worst);
  }
  const double c = errors[0] / std::sqrt(levels[0]);
  const double bound = c * std::sqrt(levels[1]);
  std::ostringstream what;
  what << "error(1e-4)=" << errors[1] << " <= C sqrt(eps)=" << bound;
  out.require(errors[1] <= bound, what.str());
  const double slope = std::log(errors[1] / errors[0]) / std::log(levels[1] / levels[0]);
  out.detail << "exact max=" << worst_exact << " C=" << c << " errors=" << errors[0] << "," << errors[1]
             << " measured exponent=" << slope;
}

// A6 -------------------------------------------------------------------------
void criterion_a6(Outcome& out) {
  std::mt19937_64 rng(6);
  double worst_exact = 0.0;
  double worst_ratio = 0.0;
  for (std::size_t n : {1u, 2u}) {
    const auto d1 = Eigen::Index{1} << n;
    const Matrix id = Matrix::Identity(d1, d1);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix w = oracle::random_unitary(2 + trial % 2, rng);
      const CommutantFactor f = commutant_factor(oracle::kron(id, w), n);
      worst_exact = std::max(worst_exact, f.residual);
    }
    for (double eps : {1e-4, 1e-3}) {
      for (int trial = 0; trial < 10; ++trial) {
        const Matrix w = oracle::random_unitary(2, rng);
        const Matrix k = oracle::random_hermitian_unit(2 * d1, rng);
        const Matrix u = oracle::kron(id, w) * Matrix((Complex(0, eps) * k).exp());
        worst_ratio = std::max(worst_ratio, commutant_factor(u, n).residual / eps);
      }
    }
  }
  out.require(worst_exact <= 1e-12, "exact products: residual <= 1e-12");
  out.require(worst_ratio <= 10.0, "perturbed: residual <= 10 eps");
  out.detail << "exact max=" << worst_exact << " max residual/eps=" << worst_ratio;
}

// A7 -------------------------------------------------------------------------
double phase_free_distance(const Matrix& a, const Matrix& b) {
  double best = 1e9;
  for (int k = 0; k < 3600; ++k) {
    const double phi = 2 * kPi * k / 3600;
    best = std::min(best, oracle::opnorm(a - std::exp(Complex(0, phi)) * b));
  }
  return best;
}

void criterion_a7(Outcome& out) {
  double worst_good = 0.0;
  for (const char* name : {"H", "X", "ROT(pi/5)", "CNOT"}) {
    const std::size_t arity = builtin_gate_arity(name);
    std::vector<std::size_t> wires(arity);
    for (std::size_t i = 0; i < arity; ++i) wires[i] = i;
    const IdealCircuit c = single_gate_circuit(name, arity, wires);
    for (const char* uri : {"builtin:honest", "builtin:rotated?theta=0.6283", "builtin:rotated?theta=2.1"}) {
      const EquivalenceReport r = certify_gate_equivalence(resolve_builtin_device(uri, c), c, 1);
      worst_good = std::max(worst_good, r.gate_residual.value_or(2.0));
    }
  }
  out.require(worst_good <= 1e-9, "correct gates: residual <= 1e-9");

  struct Wrong {
    std::string gate;
    Matrix replacement;
  };
  Matrix reversed_cnot = Matrix::Zero(4, 4);
  reversed_cnot(0, 0) = reversed_cnot(3, 1) = reversed_cnot(2, 2) = reversed_cnot(1, 3) = 1.0;
  std::vector<Wrong> wrong{{"H", rotation(kPi / 8)},
                           {"ROT(pi/5)", rotation(kPi / 5 + 0.35)},
                           {"X", oracle::pauli_z()},
                           {"CNOT", reversed_cnot}};
  std::mt19937_64 rng(7);
  for (const char* name : {"H", "ROT(pi/5)", "CNOT"}) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << builtin_gate_arity(name));
    const Matrix t = builtin_gate_matrix(name).cast<Complex>();
    int added = 0;
    while (added < 3) {
      const Matrix g = oracle::random_orthogonal(d, rng).cast<Complex>();
      if (phase_free_distance(g, t) >= 0.3) {
        wrong.push_back({name, g});
        ++added;
      }
    }
  }
  double worst_bad = 1e9;
  std::ostringstream goldens;
  for (const Wrong& w : wrong) {
    const std::size_t arity = builtin_gate_arity(w.gate);
    std::vector<std::size_t> wires(arity);
    for (std::size_t i = 0; i < arity; ++i) wires[i] = i;
    const IdealCircuit c = single_gate_circuit(w.gate, arity, wires);
    const Matrix t = builtin_gate_matrix(w.gate).cast<Complex>();
    const double dist = phase_free_distance(w.replacement, t);
    out.require(dist >= 0.3 - 1e-9, "wrong gate at distance >= 0.3");
    DeviceModel dev = resolve_builtin_device("builtin:honest", c);
    set_gate(dev, DeviceGate{w.gate, Side::A, wires, w.replacement});
    const double r = certify_gate_equivalence(dev, c, 1).gate_residual.value_or(2.0);
    worst_bad = std::min(worst_bad, r);
    goldens << w.gate << ":" << r << " ";
  }
  out.require(worst_bad >= 0.1, "wrong gates: residual >= 0.1");
  out.detail << "correct max=" << worst_good << " wrong min=" << worst_bad << " (" << goldens.str() << ")";
}

// A8 -------------------------------------------------------------------------
double verdict_gap(const Verdict& a, const Verdict& b) {
  if (a.accepted != b.accepted || a.records.size() != b.records.size() || a.y != b.y) return 1.0;
  double gap = std::abs(a.max_deviation - b.max_deviation);
  for (std::size_t i = 0; i < a.records.size(); ++i) gap = std::max(gap, std::abs(a.records[i].est_p - b.records[i].est_p));
  for (const auto& [k, p] : a.histogram) {
    const auto it = b.histogram.find(k);
    gap = std::max(gap, std::abs(p - (it == b.histogram.end() ? 0.0 : it->second)));
  }
  return std::max(gap, std::abs(a.tv_distance - b.tv_distance));
}

double report_gap(const EquivalenceReport& a, const EquivalenceReport& b) {
  if (a.s_basis.rank != b.s_basis.rank) return 1.0;
  double gap = std::abs(a.state_residual - b.state_residual);
  for (std::size_t i = 0; i < a.projector_residuals.size(); ++i) {
    gap = std::max(gap, std::abs(a.projector_residuals[i].residual - b.projector_residuals[i].residual));
  }
  if (a.gate_residual && b.gate_residual) gap = std::max(gap, std::abs(*a.gate_residual - *b.gate_residual));
  return gap;
}

void criterion_a8(Outcome& out) {
  double worst = 0.0;
  std::size_t comparisons = 0;
  for (const IdealCircuit& c : {single_gate_circuit("H"), bell_prep_circuit(), figure_one_circuit()}) {
    const DeviceModel honest = resolve_builtin_device("builtin:honest", c);
    for (double theta : {0.3, 0.6283, 1.7, 3.0}) {
      std::ostringstream uri;
      uri << "builtin:rotated?theta=" << theta;
      const DeviceModel rot = resolve_builtin_device(uri.str(), c);
      const std::vector<int> x(c.n, 0);
      for (std::size_t w = 0; w < c.n; ++w) {
        worst = std::max(worst, verdict_gap(epr_test(honest, w, exact_options()), epr_test(rot, w, exact_options())));
        ++comparisons;
      }
      worst = std::max(worst, verdict_gap(circuit_test(honest, c, x, exact_options()), circuit_test(rot, c, x, exact_options())));
      TestOptions s;
      s.mode = Mode::Sampled;
      s.seed = 99;
      worst = std::max(worst, verdict_gap(circuit_test(honest, c, x, s), circuit_test(rot, c, x, s)));
      std::vector<std::size_t> wires(c.n);
      for (std::size_t i = 0; i < c.n; ++i) wires[i] = i;
      worst = std::max(worst, report_gap(certify_state_equivalence(honest, honest.source, wires),
                                         certify_state_equivalence(rot, rot.source, wires)));
      for (std::size_t j = 1; j <= c.gates.size(); ++j) {
        worst = std::max(worst, report_gap(certify_gate_equivalence(honest, c, j), certify_gate_equivalence(rot, c, j)));
        ++comparisons;
      }
      comparisons += 3;
    }
  }
  out.require(worst <= 1e-8, "rotated matches honest within 1e-8");
  out.detail << "comparisons=" << comparisons << " max gap=" << worst;
}

// A9 -------------------------------------------------------------------------
IdealCircuit random_circuit(std::size_t n, std::size_t t, std::mt19937_64& rng) {
  IdealCircuit c;
  c.n = n;
  c.input.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) c.input[i] = static_cast<int>(rng() % 2);
  for (std::size_t g = 0; g < t; ++g) {
    const std::size_t arity = 1 + g % 2;
    std::vector<std::size_t> wires(n);
    for (std::size_t i = 0; i < n; ++i) wires[i] = i;
    std::shuffle(wires.begin(), wires.end(), rng);
    wires.resize(arity);
    c.gates.push_back(IdealGate{"G" + std::to_string(g), wires, oracle::random_orthogonal(1 << arity, rng)});
  }
  return c;
}

void criterion_a9(Outcome& out) {
  std::mt19937_64 rng(9);
  const std::vector<std::size_t> ts{5, 20, 50};
  for (std::size_t n : {2u, 4u}) {
    std::vector<double> counts;
    for (std::size_t t : ts) {
      const IdealCircuit c = random_circuit(n, t, rng);
      TestOptions o;
      o.forced_y = c.input;
      const Verdict v = circuit_test(resolve_builtin_device("builtin:honest", c), c, c.input, o);
      out.require(v.accepted, "honest random circuit accepted");
      out.require(v.n_experiments <= 2 * (t + n) + 1, "experiments <= 2(t+n)+1");
      counts.push_back(static_cast<double>(v.records.size()));
      out.detail << "n=" << n << " t=" << t << ": experiments=" << v.n_experiments << " records=" << v.records.size()
                 << "; ";
    }
    const double s1 = (counts[1] - counts[0]) / static_cast<double>(ts[1] - ts[0]);
    const double s2 = (counts[2] - counts[1]) / static_cast<double>(ts[2] - ts[1]);
    const double spread = std::abs(s1 - s2) / (0.5 * (s1 + s2));
    out.require(spread <= 0.2, "record-count slope within 20%");
    out.detail << "slopes=" << s1 << "," << s2 << " spread=" << spread << "; ";
  }
}

}  // namespace
}  // namespace selftest

int main(int argc, char** argv) {
  using namespace selftest;
  std::vector<std::string> only;
  CLI::App app{"acceptance criteria"};
  app.add_option("--only", only, "criteria to run (default: all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"A1", criterion_a1}, {"A2", criterion_a2}, {"A3", criterion_a3}, {"A4", criterion_a4}, {"A5", criterion_a5},
      {"A6", criterion_a6}, {"A7", criterion_a7}, {"A8", criterion_a8}, {"A9", criterion_a9}};
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("%s %s  %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
