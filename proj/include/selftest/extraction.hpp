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

// Constructive equivalence checks. Local unitaries built from a device's
// own projectors swap each physical wire into an adjoined logical qubit;
// residual distances measure how far the device is from the ideal one on
// the span of its projected source states.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selftest/protocol.hpp"

namespace selftest {

/// A base space with a 2-dimensional logical qubit prepended.
struct LogicalExtension {
  SubsystemDims base;
  SubsystemDims extended;

  explicit LogicalExtension(SubsystemDims base_dims);
  /// |0> (x) x
  PhysState inject(const PhysState& x) const;
  /// (<0| (x) Id) y
  PhysState project(const PhysState& y) const;
};

/// 2 P^{pi/4} - Id on the wire's subsystem.
Matrix build_not(const DeviceModel& device, Side side, std::size_t wire, const Tolerances& tol = {});

/// Unitary on (logical qubit) (x) (wire subsystem), logical first:
/// (|0><0| (x) Id + |1><1| (x) N)(Id (x) P^0 + X (x) P^{pi/2}).
Matrix build_swap_extraction(const DeviceModel& device, Side side, std::size_t wire,
                             const Tolerances& tol = {});

struct ProjectorResidual {
  Side side = Side::A;
  std::size_t wire = 0;
  Angle angle;
  double residual = 0.0;
};

struct EquivalenceReport {
  std::vector<std::size_t> wires;
  /// Logical A qubits (one per wire), logical B qubits, then the device layout.
  SubsystemDims extended_layout;
  std::vector<LocalOperator> u_bar_a;
  std::vector<LocalOperator> u_bar_b;

  SubspaceBasis s_basis;  ///< orthonormal, on the device layout
  std::size_t s_generators = 0;
  std::vector<double> s_singular_values;

  double state_residual = 0.0;
  double chi_norm = 0.0;
  std::vector<ProjectorResidual> projector_residuals;
  double max_projector_residual = 0.0;

  // gate certification only
  std::optional<std::string> gate_label;
  std::optional<double> gate_residual;
  std::optional<double> factor_residual;
  std::optional<double> post_state_residual;
  std::size_t w_rank = 0;

  double max_residual() const;
};

/// S is spanned by products of projectors over `wires` applied to `state`:
/// all of A x A per wire for up to two wires, {Id, P^0, P^{pi/8}, P^{pi/4}}
/// per side and wire for three or more (same span, fewer generators).
EquivalenceReport certify_state_equivalence(const DeviceModel& device, const PhysState& state,
                                            const std::vector<std::size_t>& wires,
                                            const Tolerances& tol = {});

/// Certifies the A-side gate of circuit step `step` (1-based) against its
/// ideal matrix. Gates are applied as in the circuit test with x = y.
EquivalenceReport certify_gate_equivalence(const DeviceModel& device, const IdealCircuit& circuit,
                                           std::size_t step, const Tolerances& tol = {});

/// Estimate of a real density matrix from the probabilities of projecting
/// onto |b_1>...|b_n>, b_i in {0, pi/4, pi/2}. The {I,X,Z} Pauli part is
/// read off linearly; for n >= 2 the remaining words with an even number of
/// Y factors are filled in from the closest real pure state.
Matrix tomo_reconstruct(const std::map<std::vector<Angle>, double>& stats, std::size_t n);

/// {I,X,Z}-word coefficients only, as a 2^n x 2^n matrix.
Matrix observable_part(const Matrix& rho, std::size_t n);

struct CommutantFactor {
  std::optional<Matrix> w;
  double residual = 2.0;
  double min_singular = 0.0;
};

/// Best Id (x) W for a unitary on H1 (x) H2 with dim H1 = 2^n, from the
/// polar factor of the average diagonal block.
CommutantFactor commutant_factor(const Matrix& u, std::size_t n);

struct CollapseReport {
  double max_side_difference = 0.0;   ///< max_a ||P_A^a psi - P_B^a psi||
  double max_joint_difference = 0.0;  ///< max_a ||P_A^a psi - P_A^a P_B^a psi||
};

CollapseReport check_collapse_symmetry(const DeviceModel& device, const PhysState& state,
                                       std::size_t wire);

struct BasisGeometryReport {
  std::array<double, 4> lengths{};
  std::array<double, 4> ideal_lengths{};
  double max_off_diagonal = 0.0;
  double max_length_error = 0.0;
  Matrix basis_change;
  Matrix ideal_basis_change;
  double max_basis_change_error = 0.0;
};

/// Geometry of the four vectors P_A^a P_B^b psi, a in {alpha, alpha+pi/2},
/// b in {beta, beta+pi/2}, and the change of basis to the (alpha2, beta2) set.
BasisGeometryReport check_basis_geometry(const DeviceModel& device, const PhysState& state,
                                         std::size_t wire, Angle alpha, Angle beta, Angle alpha2,
                                         Angle beta2);

}  // namespace selftest
