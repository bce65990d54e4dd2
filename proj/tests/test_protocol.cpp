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


#include <gtest/gtest.h>

#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "selftest/builtin.hpp"
#include "selftest/protocol.hpp"

namespace selftest {
namespace {

std::size_t count_kind(const ExperimentSchedule& s, ExperimentKind k) {
  std::size_t n = 0;
  for (const Experiment& e : s.experiments) n += e.kind == k;
  return n;
}

TEST(EprTest, HonestAcceptsExactly) {
  const Verdict v = epr_test(honest_device(1), 0, TestOptions{});
  EXPECT_TRUE(v.accepted);
  EXPECT_EQ(v.records.size(), 36u);
  EXPECT_LE(v.max_deviation, 1e-12);
}

TEST(EprTest, DepolarizedRejectedWithKnownWorstDeviation) {
  TestOptions o;
  o.eps = 0.01;
  const Verdict v = epr_test(noisy_source_device(single_gate_circuit("H"), 0.2), 0, o);
  EXPECT_FALSE(v.accepted);
  EXPECT_NEAR(v.max_deviation, 0.05, 1e-12);
  for (const StatRecord& r : v.records) {
    const Angle a = r.setting.measurements[0].angle;
    const Angle b = r.setting.measurements[1].angle;
    EXPECT_NEAR(r.deviation, oracle::depolarized_deviation(0.2, a.radians(), b.radians()), 1e-12);
  }
}

TEST(EprTest, ClassicalSourceRejected) {
  const Verdict v = epr_test(classical_source_device(single_gate_circuit("H")), 0, TestOptions{});
  EXPECT_FALSE(v.accepted);
  bool seen = false;
  for (const StatRecord& r : v.records) {
    if (r.setting.describe() == "A0=pi/4 B0=pi/4") {
      seen = true;
      EXPECT_NEAR(r.est_p, 0.25, 1e-12);
      EXPECT_NEAR(r.ideal_p, 0.5, 1e-12);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(EprTest, VerdictAgreesWithDeviations) {
  for (double p : {0.0, 0.1, 0.3}) {
    TestOptions o;
    o.eps = 0.03;
    const Verdict v = epr_test(noisy_source_device(single_gate_circuit("H"), p), 0, o);
    bool all_ok = true;
    for (const StatRecord& r : v.records) all_ok = all_ok && r.deviation <= o.eps;
    EXPECT_EQ(v.accepted, all_ok);
  }
}

TEST(EprTest, MonotoneUnderAddedNoise) {
  const IdealCircuit c = single_gate_circuit("H");
  double prev = 0.0;
  for (double p : {0.0, 0.01, 0.05, 0.2, 0.6}) {
    const Verdict v = epr_test(noisy_source_device(c, p), 0, TestOptions{});
    double diag = 0.0;
    for (const StatRecord& r : v.records) {
      if (r.setting.measurements[0].angle == r.setting.measurements[1].angle) diag = std::max(diag, r.deviation);
    }
    EXPECT_GE(diag, prev - 1e-12);
    prev = diag;
  }
}

TEST(EprTest, SampledSoundness) {
  TestOptions o;
  o.mode = Mode::Sampled;
  int accepted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    o.seed = seed;
    accepted += epr_test(honest_device(1), 0, o).accepted;
  }
  EXPECT_GE(accepted, 90);
  o.seed = 42;
  const Verdict a = epr_test(honest_device(1), 0, o);
  const Verdict b = epr_test(honest_device(1), 0, o);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].est_p, b.records[i].est_p);
  EXPECT_EQ(a.samples_per_statistic, sample_size(0.1, 0.05, 36));
}

TEST(Schedule, NoNotGatesWhenInputMatches) {
  const IdealCircuit c = bell_prep_circuit();
  const ExperimentSchedule s = build_schedule(c, {0, 0}, {0, 0});
  EXPECT_EQ(s.steps.size(), c.gates.size());
}

TEST(Schedule, OneNotPerDifferingBit) {
  const IdealCircuit c = bell_prep_circuit();
  const ExperimentSchedule s = build_schedule(c, {0, 0}, {1, 0});
  ASSERT_EQ(s.steps.size(), c.gates.size() + 1);
  EXPECT_EQ(s.steps[0].label, "NOT");
  EXPECT_EQ(s.steps[0].wires, std::vector<std::size_t>{0});
  EXPECT_EQ(count_kind(s, ExperimentKind::Tomography), 3u);
  EXPECT_THROW(build_schedule(c, {0}, {0, 0}), std::invalid_argument);
}

TEST(Schedule, FigureOnePattern) {
  const ExperimentSchedule s = build_schedule(figure_one_circuit(), {0, 0}, {0, 0});
  EXPECT_EQ(count_kind(s, ExperimentKind::Conspiracy), 4u);
  EXPECT_EQ(count_kind(s, ExperimentKind::Tomography), 3u);
  EXPECT_EQ(s.experiments[0].wires, (std::vector<std::size_t>{0, 1}));
  // tomography j: A through j, B through j-1
  const Experiment& t2 = s.experiments[3];
  EXPECT_EQ(t2.kind, ExperimentKind::Tomography);
  EXPECT_EQ(t2.step, 2u);
  EXPECT_EQ(t2.prep.size(), 3u);
  EXPECT_EQ(t2.settings.size(), 81u);
  EXPECT_EQ(s.experiments[4].prep.size(), 4u);
}

TEST(Schedule, SizeBounds) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    IdealCircuit c;
    c.n = 3;
    c.input = {0, 0, 0};
    for (int g = 0; g < 6; ++g) {
      const std::size_t arity = 1 + rng() % 3;
      std::vector<std::size_t> wires{0, 1, 2};
      std::shuffle(wires.begin(), wires.end(), rng);
      wires.resize(arity);
      c.gates.push_back(IdealGate{"G" + std::to_string(g), wires, oracle::random_orthogonal(1 << arity, rng)});
    }
    std::vector<int> y{int(rng() % 2), int(rng() % 2), int(rng() % 2)};
    const ExperimentSchedule s = build_schedule(c, c.input, y);
    const std::size_t tp = s.steps.size();
    EXPECT_LE(s.experiments.size(), 2 * tp + 1);
    EXPECT_LE(s.record_count(), 36 * 3 + 36 * 3 * tp + 729 * tp);
  }
}

TEST(CircuitTest, BellPrepHistogram) {
  const IdealCircuit c = bell_prep_circuit();
  const Verdict v = circuit_test(honest_device(c), c, {0, 0}, TestOptions{});
  EXPECT_TRUE(v.accepted);
  EXPECT_LE(v.max_deviation, 1e-12);
  ASSERT_EQ(v.histogram.size(), 2u);
  EXPECT_NEAR(v.histogram.at("00"), 0.5, 1e-12);
  EXPECT_NEAR(v.histogram.at("11"), 0.5, 1e-12);
  EXPECT_LE(v.tv_distance, 1e-12);
}

TEST(CircuitTest, NotGateHistogram) {
  const IdealCircuit c = single_gate_circuit("X");
  const Verdict v = circuit_test(honest_device(c), c, {0}, TestOptions{});
  EXPECT_TRUE(v.accepted);
  ASSERT_EQ(v.histogram.size(), 1u);
  EXPECT_NEAR(v.histogram.at("1"), 1.0, 1e-12);
}

TEST(CircuitTest, ForcedOutcomeAddsNotGates) {
  const IdealCircuit c = figure_one_circuit();
  TestOptions o;
  o.forced_y = std::vector<int>{1, 1};
  const Verdict v = circuit_test(honest_device(c), c, {0, 0}, o);
  EXPECT_TRUE(v.accepted);
  EXPECT_EQ(v.y, (std::vector<int>{1, 1}));
  EXPECT_EQ(v.n_experiments, 11u);
  EXPECT_LE(v.tv_distance, 1e-12);
}

TEST(CircuitTest, HonestAcceptsCorpus) {
  for (const IdealCircuit& c : {figure_one_circuit(), bell_prep_circuit(), single_gate_circuit("H"),
                                single_gate_circuit("SWAP", 2, {0, 1}), single_gate_circuit("ROT(2pi/7)", 1)}) {
    for (int x = 0; x < (1 << c.n); ++x) {
      std::vector<int> bits(c.n);
      for (std::size_t i = 0; i < c.n; ++i) bits[i] = (x >> (c.n - 1 - i)) & 1;
      const Verdict v = circuit_test(honest_device(c), c, bits, TestOptions{});
      EXPECT_TRUE(v.accepted);
      EXPECT_LE(v.max_deviation, 1e-12);
      EXPECT_LE(v.tv_distance, 1e-12);
    }
  }
}

TEST(CircuitTest, VanDamRejected) {
  TestOptions o;
  o.eps = 0.05;
  o.forced_y = std::vector<int>{0};
  const Verdict v = circuit_test(van_dam_device(), single_gate_circuit("H"), {0}, o);
  EXPECT_FALSE(v.accepted);
  EXPECT_FALSE(v.failing.empty());
}

TEST(CircuitTest, InputLengthChecked) {
  const IdealCircuit c = bell_prep_circuit();
  EXPECT_THROW(circuit_test(honest_device(c), c, {0}, TestOptions{}), std::invalid_argument);
}

// perturbs every gate, frame and pair of the honest device by at most delta
DeviceModel perturbed(const IdealCircuit& c, double delta, std::mt19937_64& rng) {
  DeviceModel d = honest_device(c);
  for (DeviceGate& g : d.gates) {
    const Matrix k = oracle::random_hermitian_unit(g.unitary.rows(), rng);
    g.unitary = g.unitary * Matrix((Complex(0, delta) * k).exp());
  }
  for (MeasurementFrame& f : d.frames) {
    const Matrix v = Matrix((Complex(0, delta / 2) * oracle::random_hermitian_unit(2, rng)).exp());
    for (Matrix& p : f.primary) p = v * p * v.adjoint();
  }
  std::vector<PhysState> pairs;
  for (std::size_t w = 0; w < c.n; ++w) {
    std::normal_distribution<double> g;
    Vector r(4);
    for (Eigen::Index i = 0; i < 4; ++i) r(i) = Complex(g(rng), g(rng));
    Vector v = oracle::bell() + (delta / 2) * r.normalized();
    pairs.emplace_back(SubsystemDims({2, 2, 1}), v.normalized());
  }
  return with_source(d, pairs);
}

TEST(CircuitTest, DeviationLinearInPerturbation) {
  std::mt19937_64 rng(17);
  for (const IdealCircuit& c : {single_gate_circuit("H"), bell_prep_circuit()}) {
    for (double delta : {1e-3, 1e-2}) {
      for (int trial = 0; trial < 5; ++trial) {
        const DeviceModel d = perturbed(c, delta, rng);
        ASSERT_NO_THROW(d.validate());
        TestOptions o;
        o.forced_y = std::vector<int>(c.n, 0);
        const Verdict v = circuit_test(d, c, std::vector<int>(c.n, 0), o);
        EXPECT_LE(v.max_deviation, 8 * delta);
      }
    }
  }
}

TEST(CheckSimulation, HonestRotatedAndNoisy) {
  const IdealCircuit c = single_gate_circuit("H");
  const std::vector<Setting> s = epr_settings(0);
  EXPECT_LE(check_simulation(honest_device(c), honest_device(c).source, IdealContext::conspiracy(), s), 1e-12);
  const DeviceModel r = rotated_device(c, 0.6283);
  EXPECT_LE(check_simulation(r, r.source, IdealContext::conspiracy(), s), 1e-12);
  const DeviceModel n = noisy_source_device(c, 0.08);
  EXPECT_NEAR(check_simulation(n, n.source, IdealContext::conspiracy(), s), 0.02, 1e-12);
  EXPECT_THROW(check_simulation(n, n.source, IdealContext::conspiracy(), {}), std::invalid_argument);
}

TEST(InputPrep, HonestCollapse) {
  for (const IdealCircuit& c : {single_gate_circuit("H"), bell_prep_circuit()}) {
    const Verdict v = input_prep_check(honest_device(c), c, 1e-9);
    EXPECT_TRUE(v.accepted);
    EXPECT_LE(v.max_deviation, 1e-12);
    EXPECT_EQ(v.records.size(), (6 * c.n + (1u << c.n)) << c.n);
  }
}

TEST(InputPrep, DepolarizedHalfNoiseAtBasisAngle) {
  const double p = 0.1;
  const Verdict v = input_prep_check(noisy_source_device(single_gate_circuit("H"), p), single_gate_circuit("H"), 0.01);
  EXPECT_FALSE(v.accepted);
  EXPECT_NEAR(v.max_deviation, p / 2, 1e-12);
  for (const StatRecord& r : v.records) {
    if (r.experiment == "input|0" && r.setting.describe() == "A0=0") EXPECT_NEAR(r.deviation, p / 2, 1e-12);
  }
}

TEST(InputPrep, ZeroProbabilityBranchSkipped) {
  const IdealCircuit c = single_gate_circuit("H");
  const DeviceModel d = with_source(honest_device(c), {PhysState::basis(SubsystemDims({2, 2, 1}), 0)});
  const Verdict v = input_prep_check(d, c, 0.1);
  ASSERT_EQ(v.notes.size(), 1u);
  EXPECT_NE(v.notes[0].find("probability 0"), std::string::npos);
}

TEST(LegacyCheck, VanDamPassesHadamardCheck) {
  const DeviceModel d = van_dam_device();
  EXPECT_NEAR(legacy_gate_check(d, "H", 0, 0, 1), 0.5, 1e-15);
  EXPECT_NEAR(legacy_gate_check(d, "H", 0, 0, 2), 1.0, 1e-15);
  const DeviceModel h = honest_device(single_gate_circuit("H"));
  EXPECT_NEAR(legacy_gate_check(h, "H", 0, 0, 1), 0.5, 1e-15);
}

TEST(CircuitUnitary, ComposesInOrder) {
  const IdealCircuit c = bell_prep_circuit();
  const Matrix u = circuit_unitary(2, c.gates).cast<Complex>();
  const Matrix expect = oracle::cnot() * oracle::kron(oracle::hadamard(), Matrix(Matrix::Identity(2, 2)));
  EXPECT_LT((u - expect).norm(), 1e-14);
}

}  // namespace
}  // namespace selftest
