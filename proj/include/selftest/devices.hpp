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

// Untrusted device models: a source state shared between two sides, unitary
// gates acting on one side only, and two-outcome measurement frames.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selftest/angles.hpp"
#include "selftest/hilbert.hpp"

namespace selftest {

enum class Side { A, B };

std::string_view side_name(Side s);
Side parse_side(std::string_view text);

/// Wire structure. Subsystem order in the full layout is
/// A^0..A^{n-1}, B^0..B^{n-1}, C^0..C^{n-1}; C^i purifies the pair A^iB^i.
struct RegisterLayout {
  std::size_t n_wires = 0;
  std::vector<std::size_t> a_dims;
  std::vector<std::size_t> b_dims;
  std::vector<std::size_t> c_dims;

  static RegisterLayout qubits(std::size_t n, std::size_t c_dim = 1);

  std::size_t subsystem(Side side, std::size_t wire) const;
  std::size_t env_subsystem(std::size_t wire) const { return 2 * n_wires + wire; }
  std::size_t wire_dim(Side side, std::size_t wire) const;
  SubsystemDims full() const;
  void validate() const;

  bool operator==(const RegisterLayout&) const = default;
};

/// Projectors for one side of one wire. Only the primary branches
/// (0, pi/8, pi/4) are stored; complements are Id - P.
struct MeasurementFrame {
  Side side = Side::A;
  std::size_t wire = 0;
  std::array<Matrix, 3> primary;

  Matrix projector(Angle a) const;
};

struct DeviceGate {
  std::string label;
  Side side = Side::A;
  std::vector<std::size_t> wires;
  Matrix unitary;
};

struct GateRef {
  std::string label;
  Side side = Side::A;
  std::vector<std::size_t> wires;

  bool operator==(const GateRef&) const = default;
};

enum class SourceKind { Epr, Matrix, Depolarized };

struct SourceSpec {
  SourceKind kind = SourceKind::Epr;
  double p = 0.0;  ///< depolarizing weight (Depolarized only)
};

struct DeviceModel {
  std::string name;
  std::string description;
  RegisterLayout layout;
  SourceSpec source_spec;
  PhysState source;
  std::vector<DeviceGate> gates;
  std::vector<MeasurementFrame> frames;

  const DeviceGate* find_gate(std::string_view label, Side side,
                              const std::vector<std::size_t>& wires) const;
  const DeviceGate& gate(const GateRef& ref) const;
  const MeasurementFrame& frame(Side side, std::size_t wire) const;

  /// Gate as an operator on the full layout's subsystems.
  LocalOperator gate_operator(const GateRef& ref) const;
  LocalOperator projector(Side side, std::size_t wire, Angle a) const;

  /// Throws InvariantError naming the violated property.
  void validate(const Tolerances& tol = {}) const;
};

/// Adds or replaces the gate keyed by (label, side, wires).
void set_gate(DeviceModel& device, DeviceGate gate);
void set_frame(DeviceModel& device, MeasurementFrame frame);

struct IdealGate {
  std::string label;
  std::vector<std::size_t> wires;
  RealMatrix matrix;
};

struct IdealCircuit {
  std::size_t n = 0;
  std::vector<IdealGate> gates;
  std::vector<int> input;  ///< one bit per wire

  void validate(const Tolerances& tol = {}) const;
};

std::string bits_to_string(const std::vector<int>& bits);
std::vector<int> parse_bits(std::string_view text, std::size_t n);

/// Source on the full layout from one state per wire pair, each laid out as
/// (A^i, B^i, C^i).
PhysState assemble_source(const RegisterLayout& layout, const std::vector<PhysState>& pairs);

/// (|00> + |11>)/sqrt 2 on two qubits.
PhysState phi_plus();
/// 2^{-k/2} sum_x |x>|x> on k + k qubits (all first-register qubits first).
PhysState phi_plus_n(std::size_t k);

/// Ideal counterpart of a real A-side gate on the B side: the matrix that
/// restores the maximally entangled state after the A-side gate.
Matrix b_side_partner(const RealMatrix& t);

Matrix pauli_x();

// Built-in device families -------------------------------------------------

DeviceModel honest_device(const IdealCircuit& circuit);
DeviceModel honest_device(std::size_t n_wires);

struct VanDamOptions {
  /// Hidden qubit (0 or 1) that carries the pi/8 and pi/4 frames.
  std::size_t frame_qubit = 0;
};
DeviceModel van_dam_device(const VanDamOptions& options = {});

/// Honest device conjugated wire-wise by v_a (A side) and v_b (B side).
DeviceModel rotated_device(const IdealCircuit& circuit, const std::vector<Matrix>& v_a,
                           const std::vector<Matrix>& v_b);
/// Builtin rotated family: v_a = rotation(theta), v_b = diag(1, e^{i theta}).
DeviceModel rotated_device(const IdealCircuit& circuit, double theta);

DeviceModel noisy_source_device(const IdealCircuit& circuit, double p);
/// Classically correlated pairs (|000> + |111>)/sqrt 2 with C^i of dimension 2.
DeviceModel classical_source_device(const IdealCircuit& circuit);

/// Same device with a different source; the layout's C dims follow `pairs`.
DeviceModel with_source(const DeviceModel& device, const std::vector<PhysState>& pairs);

/// Per-wire pair state for the depolarized source (C^i of dimension 4).
PhysState depolarized_pair(double p);

Matrix rotation(double theta);

}  // namespace selftest
