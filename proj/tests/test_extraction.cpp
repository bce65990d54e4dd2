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
#include "selftest/extraction.hpp"

namespace selftest {
namespace {

using oracle::kPi;

DeviceModel with_wrong_gate(DeviceModel d, const std::string& label, std::vector<std::size_t> wires, Matrix m) {
  set_gate(d, DeviceGate{label, Side::A, std::move(wires), std::move(m)});
  return d;
}

std::map<std::vector<Angle>, double> exact_tomography_stats(const Matrix& rho, std::size_t n) {
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

TEST(LogicalExtension, ProjectInvertsInject) {
  const LogicalExtension e(SubsystemDims({3, 2}));
  EXPECT_EQ(e.extended, SubsystemDims({2, 3, 2}));
  std::mt19937_64 rng(1);
  const Vector x = oracle::random_unitary(6, rng).col(0);
  const PhysState s(e.base, x);
  EXPECT_LT((e.project(e.inject(s)).amplitudes - x).norm(), 1e-15);
  EXPECT_LT(e.inject(s).amplitudes.tail(6).norm(), 1e-15);
}

TEST(BuildNot, HonestIsPauliX) {
  const DeviceModel d = honest_device(1);
  EXPECT_LT((build_not(d, Side::A, 0) - oracle::pauli_x()).norm(), 1e-15);
}

TEST(BuildNot, InvolutionForEveryDevice) {
  const IdealCircuit c = single_gate_circuit("H");
  for (const DeviceModel& d : {honest_device(c), rotated_device(c, 0.9), van_dam_device(), noisy_source_device(c, 0.3)}) {
    for (Side s : {Side::A, Side::B}) {
      const Matrix n = build_not(d, s, 0);
      EXPECT_LT((n * n - Matrix::Identity(n.rows(), n.cols())).norm(), 1e-10);
      EXPECT_LT((n - n.adjoint()).norm(), 1e-12);
    }
  }
  // rotated: V X V^dag
  const Matrix v = rotation(0.9);
  EXPECT_LT((build_not(rotated_device(c, 0.9), Side::A, 0) - v * oracle::pauli_x() * v.adjoint()).norm(), 1e-14);
}

TEST(SwapExtraction, HonestSwapsIntoLogicalQubit) {
  const DeviceModel d = honest_device(1);
  const Matrix u = build_swap_extraction(d, Side::A, 0);
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  Vector zero(2);
  zero << 1, 0;
  for (double a : {0.0, kPi / 2, kPi / 8, 0.77}) {
    const Vector psi = angle_state(a).amplitudes;
    EXPECT_LT((u * oracle::kron(zero, psi) - oracle::kron(psi, zero)).norm(), 1e-15) << a;
  }
  // on |0>_logical (x) H the map agrees with SWAP
  for (int c = 0; c < 2; ++c) EXPECT_LT((u.col(c) - swap.col(c)).norm(), 1e-15);
}

TEST(SwapExtraction, VanDamIsUnitaryOnEightDimensions) {
  const Matrix u = build_swap_extraction(van_dam_device(), Side::A, 0);
  EXPECT_EQ(u.rows(), 8);
  EXPECT_TRUE(is_unitary(u, 1e-12));
}

TEST(StateEquivalence, HonestExact) {
  const DeviceModel d = honest_device(1);
  const EquivalenceReport r = certify_state_equivalence(d, d.source, {0});
  EXPECT_EQ(r.s_basis.rank, 4u);
  EXPECT_EQ(r.s_generators, 36u);
  EXPECT_LE(r.state_residual, 1e-10);
  EXPECT_LE(r.max_projector_residual, 1e-10);
  EXPECT_EQ(r.projector_residuals.size(), 12u);
  EXPECT_NEAR(r.chi_norm, 1.0, 1e-12);
}

TEST(StateEquivalence, HonestTwoAndThreeWires) {
  for (std::size_t n : {2u, 3u}) {
    const DeviceModel d = honest_device(n);
    std::vector<std::size_t> wires(n);
    for (std::size_t i = 0; i < n; ++i) wires[i] = i;
    const EquivalenceReport r = certify_state_equivalence(d, d.source, wires);
    EXPECT_EQ(r.s_basis.rank, std::size_t{1} << (2 * n));
    EXPECT_LE(r.max_residual(), 1e-10);
  }
}

TEST(StateEquivalence, RotatedFramesInvisible) {
  const IdealCircuit c = single_gate_circuit("H");
  for (double theta : {0.3, 0.6283, 2.0}) {
    const DeviceModel d = rotated_device(c, theta);
    const EquivalenceReport r = certify_state_equivalence(d, d.source, {0});
    EXPECT_LE(r.max_residual(), 1e-9);
  }
  // wire-dependent local unitaries on a two-wire device
  std::mt19937_64 rng(4);
  const IdealCircuit fig = figure_one_circuit();
  const std::vector<Matrix> va{oracle::random_unitary(2, rng), oracle::random_unitary(2, rng)};
  const std::vector<Matrix> vb{oracle::random_unitary(2, rng), oracle::random_unitary(2, rng)};
  const DeviceModel d = rotated_device(fig, va, vb);
  EXPECT_LE(certify_state_equivalence(d, d.source, {0, 1}).max_residual(), 1e-9);
  EXPECT_LE(certify_state_equivalence(rotated_device(fig, {rotation(kPi / 5), Matrix::Identity(2, 2)},
                                                     {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}),
                                      honest_device(fig).source, {1})
                .max_residual(),
            1e-9);
}

TEST(StateEquivalence, VanDamFarFromIdeal) {
  const DeviceModel d = van_dam_device();
  const EquivalenceReport r = certify_state_equivalence(d, d.source, {0});
  EXPECT_GT(r.max_residual(), 0.3);
  EXPECT_NEAR(r.state_residual, 1 / std::sqrt(2.0), 1e-12);
}

TEST(StateEquivalence, DepolarizedResidualClosedForm) {
  // the residual is the weight outside |phi+>: sqrt(3p/4)
  for (double p : {1e-4, 1e-2, 0.1}) {
    const DeviceModel d = noisy_source_device(single_gate_circuit("H"), p);
    const EquivalenceReport r = certify_state_equivalence(d, d.source, {0});
    EXPECT_NEAR(r.state_residual, std::sqrt(3 * p / 4), 1e-12);
    EXPECT_EQ(r.s_basis.rank, 9u);
    EXPECT_EQ(r.s_singular_values.size(), 16u);  // min(36 generators, dim 16)
  }
}

TEST(GateEquivalence, HonestAndRotatedGates) {
  for (const IdealCircuit& c : {single_gate_circuit("H"), single_gate_circuit("X"), single_gate_circuit("ROT(pi/5)"),
                                single_gate_circuit("CNOT", 2, {0, 1}), figure_one_circuit()}) {
    for (std::size_t j = 1; j <= c.gates.size(); ++j) {
      const EquivalenceReport h = certify_gate_equivalence(honest_device(c), c, j);
      ASSERT_TRUE(h.gate_residual.has_value());
      EXPECT_LE(*h.gate_residual, 1e-9) << c.gates[j - 1].label;
      EXPECT_LE(h.max_residual(), 1e-9);
      const EquivalenceReport r = certify_gate_equivalence(rotated_device(c, 0.6283), c, j);
      EXPECT_LE(*r.gate_residual, 1e-9) << c.gates[j - 1].label;
    }
  }
}

TEST(GateEquivalence, WrongGateGoldens) {
  const IdealCircuit h = single_gate_circuit("H");
  const EquivalenceReport r = certify_gate_equivalence(with_wrong_gate(honest_device(h), "H", {0}, rotation(kPi / 8)), h, 1);
  EXPECT_NEAR(*r.gate_residual, 2.0, 1e-9);  // tr(H R) = 0, no nonsingular factor
  EXPECT_GE(*r.gate_residual, 0.3);

  const IdealCircuit rot = single_gate_circuit("ROT(pi/5)");
  const EquivalenceReport q =
      certify_gate_equivalence(with_wrong_gate(honest_device(rot), "ROT(pi/5)", {0}, rotation(kPi / 5 + 0.35)), rot, 1);
  // R(0.35) against Id up to a phase: |1 - e^{i 0.35}|
  EXPECT_NEAR(*q.gate_residual, std::abs(1.0 - std::exp(Complex(0, 0.35))), 1e-9);
  EXPECT_GE(*q.gate_residual, 0.1);

  EXPECT_THROW(certify_gate_equivalence(honest_device(h), h, 2), std::invalid_argument);
}

TEST(Tomography, ExactOnBasisAndBellStates) {
  const Matrix zero = oracle::proj(0.0);
  EXPECT_LT((tomo_reconstruct(exact_tomography_stats(zero, 1), 1) - zero).norm(), 1e-12);
  const Matrix bell = oracle::bell() * oracle::bell().adjoint();
  EXPECT_LT((tomo_reconstruct(exact_tomography_stats(bell, 2), 2) - bell).norm(), 1e-10);
}

TEST(Tomography, ExactOnRandomRealPureStates) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector g = oracle::random_real_unit(1 << n, rng).cast<Complex>();
      const Matrix rho = g * g.adjoint();
      EXPECT_LT(oracle::opnorm(tomo_reconstruct(exact_tomography_stats(rho, n), n) - rho), 1e-10) << n;
    }
  }
}

TEST(Tomography, ObservablePartDropsYWords) {
  Matrix yy = oracle::kron(Matrix(Matrix::Zero(2, 2)), Matrix(Matrix::Zero(2, 2)));
  Matrix y(2, 2);
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  yy = oracle::kron(y, y);
  EXPECT_LT(observable_part(yy, 2).norm(), 1e-15);
  const Matrix xz = oracle::kron(oracle::pauli_x(), oracle::pauli_z());
  EXPECT_LT((observable_part(xz, 2) - xz).norm(), 1e-15);
}

TEST(Tomography, MissingSettingsRejected) {
  auto stats = exact_tomography_stats(oracle::proj(0.0), 1);
  stats.erase(stats.begin());
  EXPECT_THROW(tomo_reconstruct(stats, 1), std::invalid_argument);
  EXPECT_THROW(tomo_reconstruct({}, 4), std::invalid_argument);
}

TEST(Tomography, NoisyPi8State) {
  std::mt19937_64 rng(9);
  const Matrix rho = oracle::proj(kPi / 8);
  for (double eps : {1e-6, 1e-4}) {
    auto stats = exact_tomography_stats(rho, 1);
    std::uniform_real_distribution<double> u(-eps, eps);
    for (auto& [k, p] : stats) p += u(rng);
    EXPECT_LE(oracle::opnorm(tomo_reconstruct(stats, 1) - rho), 4 * eps);
  }
}

TEST(Commutant, ProductsFactorExactly) {
  std::mt19937_64 rng(11);
  const CommutantFactor f = commutant_factor(oracle::kron(Matrix(Matrix::Identity(2, 2)), oracle::hadamard()), 1);
  ASSERT_TRUE(f.w.has_value());
  EXPECT_LT((*f.w - oracle::hadamard()).norm(), 1e-12);
  EXPECT_LE(f.residual, 1e-12);
  for (std::size_t n : {1u, 2u}) {
    for (int t = 0; t < 10; ++t) {
      const Matrix w = oracle::random_unitary(3, rng);
      const Matrix u = oracle::kron(Matrix(Matrix::Identity(1 << n, 1 << n)), w);
      EXPECT_LE(commutant_factor(u, n).residual, 1e-12);
    }
  }
}

TEST(Commutant, NonProductsHaveLargeResidual) {
  const CommutantFactor c = commutant_factor(oracle::cnot(), 1);
  EXPECT_FALSE(c.w.has_value());
  EXPECT_EQ(c.residual, 2.0);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const Matrix u = oracle::random_unitary(4, rng);
    EXPECT_GT(commutant_factor(u, 1).residual, 1e-3);
  }
  EXPECT_GE(commutant_factor(oracle::kron(oracle::hadamard(), Matrix(Matrix::Identity(2, 2))), 1).residual, 1.0);
}

TEST(Commutant, LinearUnderSmallPerturbation) {
  std::mt19937_64 rng(13);
  const Matrix base = oracle::kron(Matrix(Matrix::Identity(2, 2)), oracle::hadamard());
  for (double eps : {1e-4, 1e-3}) {
    const Matrix k = oracle::random_hermitian_unit(4, rng);
    const Matrix u = base * Matrix((Complex(0, eps) * k).exp());
    EXPECT_LE(commutant_factor(u, 1).residual, 10 * eps);
  }
}

TEST(Collapse, HonestSymmetric) {
  const DeviceModel d = honest_device(1);
  const CollapseReport r = check_collapse_symmetry(d, d.source, 0);
  EXPECT_LE(r.max_side_difference, 1e-12);
  EXPECT_LE(r.max_joint_difference, 1e-12);
}

TEST(Collapse, DepolarizedGrowsWithNoise) {
  double prev = 0.0;
  for (double p : {1e-4, 1e-3, 1e-2, 1e-1}) {
    const DeviceModel d = noisy_source_device(single_gate_circuit("H"), p);
    const CollapseReport r = check_collapse_symmetry(d, d.source, 0);
    EXPECT_GT(r.max_side_difference, prev);
    EXPECT_LE(r.max_side_difference, 2 * std::sqrt(p));
    prev = r.max_side_difference;
  }
}

TEST(Collapse, ProductSource) {
  const DeviceModel d = with_source(honest_device(1), {PhysState::basis(SubsystemDims({2, 2, 1}), 0)});
  const double expect = std::sqrt(2.0) * std::cos(kPi / 8) * std::sin(kPi / 8);
  EXPECT_GE(check_collapse_symmetry(d, d.source, 0).max_side_difference, expect - 1e-12);
}

TEST(BasisGeometry, HonestMatchesIdeal) {
  const DeviceModel d = honest_device(1);
  const BasisGeometryReport r = check_basis_geometry(d, d.source, 0, kAngle0, kAnglePi8, kAngle0, kAnglePi4);
  EXPECT_LE(r.max_off_diagonal, 1e-12);
  EXPECT_LE(r.max_length_error, 1e-12);
  EXPECT_NEAR(r.lengths[0], std::cos(kPi / 8) / std::sqrt(2.0), 1e-12);
  EXPECT_LE(r.max_basis_change_error, 1e-10);
  EXPECT_THROW(check_basis_geometry(d, d.source, 0, kAnglePi8, kAnglePi8, kAngle0, kAnglePi4), std::invalid_argument);
}

TEST(BasisGeometry, DepolarizedLengthError) {
  for (double p : {1e-3, 1e-2, 1e-1}) {
    const DeviceModel d = noisy_source_device(single_gate_circuit("H"), p);
    const BasisGeometryReport r = check_basis_geometry(d, d.source, 0, kAngle0, kAnglePi8, kAnglePi8, kAnglePi4);
    EXPECT_LE(r.max_length_error, std::sqrt(p));
  }
}

}  // namespace
}  // namespace selftest
