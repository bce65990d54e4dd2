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

#include "selftest/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

namespace selftest {

std::string_view side_name(Side s) { return s == Side::A ? "A" : "B"; }

Side parse_side(std::string_view text) {
  if (text == "A" || text == "a") return Side::A;
  if (text == "B" || text == "b") return Side::B;
  throw std::invalid_argument("side must be \"A\" or \"B\", got \"" + std::string(text) + "\"");
}

RegisterLayout RegisterLayout::qubits(std::size_t n, std::size_t c_dim) {
  return RegisterLayout{n, std::vector<std::size_t>(n, 2), std::vector<std::size_t>(n, 2),
                        std::vector<std::size_t>(n, c_dim)};
}

std::size_t RegisterLayout::subsystem(Side side, std::size_t wire) const {
  if (wire >= n_wires) {
    throw DimensionError("wire " + std::to_string(wire) + " out of range (device has " +
                         std::to_string(n_wires) + " wires)");
  }
  return side == Side::A ? wire : n_wires + wire;
}

std::size_t RegisterLayout::wire_dim(Side side, std::size_t wire) const {
  subsystem(side, wire);
  return side == Side::A ? a_dims[wire] : b_dims[wire];
}

SubsystemDims RegisterLayout::full() const {
  std::vector<std::size_t> dims = a_dims;
  dims.insert(dims.end(), b_dims.begin(), b_dims.end());
  dims.insert(dims.end(), c_dims.begin(), c_dims.end());
  return SubsystemDims(std::move(dims));
}

void RegisterLayout::validate() const {
  if (n_wires == 0) throw InvariantError("layout: n_wires must be at least 1");
  if (a_dims.size() != n_wires || b_dims.size() != n_wires || c_dims.size() != n_wires) {
    throw InvariantError("layout: a_dims, b_dims and c_dims must each have n_wires entries");
  }
  for (std::size_t i = 0; i < n_wires; ++i) {
    if (a_dims[i] < 2 || b_dims[i] < 2) {
      throw InvariantError("layout: wire " + std::to_string(i) + " has a side of dimension < 2");
    }
    if (c_dims[i] < 1) throw InvariantError("layout: environment dimension must be >= 1");
  }
  full();
}

Matrix MeasurementFrame::projector(Angle a) const {
  const int k = a.base().eighths();
  if (k > 2) throw std::invalid_argument("angle " + a.label() + " is not a frame angle");
  if (a.is_primary()) return primary[static_cast<std::size_t>(k)];
  const Matrix& p = primary[static_cast<std::size_t>(k)];
  return Matrix::Identity(p.rows(), p.cols()) - p;
}

const DeviceGate* DeviceModel::find_gate(std::string_view label, Side side,
                                         const std::vector<std::size_t>& wires) const {
  for (const DeviceGate& g : gates) {
    if (g.label == label && g.side == side && g.wires == wires) return &g;
  }
  return nullptr;
}

namespace {
std::string wires_text(const std::vector<std::size_t>& wires) {
  std::string s = "(";
  for (std::size_t i = 0; i < wires.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(wires[i]);
  }
  return s + ")";
}
}  // namespace

const DeviceGate& DeviceModel::gate(const GateRef& ref) const {
  const DeviceGate* g = find_gate(ref.label, ref.side, ref.wires);
  if (!g) {
    throw std::invalid_argument("device '" + name + "' has no gate '" + ref.label + "' on side " +
                                std::string(side_name(ref.side)) + " wires " + wires_text(ref.wires));
  }
  return *g;
}

const MeasurementFrame& DeviceModel::frame(Side side, std::size_t wire) const {
  for (const MeasurementFrame& f : frames) {
    if (f.side == side && f.wire == wire) return f;
  }
  throw std::invalid_argument("device '" + name + "' has no frame for side " +
                              std::string(side_name(side)) + " wire " + std::to_string(wire));
}

LocalOperator DeviceModel::gate_operator(const GateRef& ref) const {
  const DeviceGate& g = gate(ref);
  LocalOperator op;
  for (std::size_t w : g.wires) op.targets.push_back(layout.subsystem(g.side, w));
  op.matrix = g.unitary;
  op.kind = OperatorKind::Unitary;
  return op;
}

LocalOperator DeviceModel::projector(Side side, std::size_t wire, Angle a) const {
  return LocalOperator{{layout.subsystem(side, wire)}, frame(side, wire).projector(a),
                       OperatorKind::Projector};
}

void DeviceModel::validate(const Tolerances& tol) const {
  layout.validate();
  const SubsystemDims full = layout.full();
  if (!(source.layout == full)) throw InvariantError("source: layout does not match the device layout");
  if (std::abs(source.amplitudes.norm() - 1.0) > tol.structural) {
    throw InvariantError("source: state is not normalized");
  }
  if (layout.n_wires > 1) {
    for (std::size_t i = 0; i < layout.n_wires; ++i) {
      const std::vector<std::size_t> group{layout.subsystem(Side::A, i),
                                           layout.subsystem(Side::B, i), layout.env_subsystem(i)};
      const Eigen::VectorXd sv = schmidt_coefficients(source, group);
      if (sv.size() > 1 && sv(1) > 1e-8) {
        throw InvariantError("source: not separable across wire pair " + std::to_string(i) +
                             " (second Schmidt coefficient " + std::to_string(sv(1)) + ")");
      }
    }
  }

  std::set<std::tuple<std::string, int, std::vector<std::size_t>>> keys;
  for (const DeviceGate& g : gates) {
    const std::string where = "gate '" + g.label + "' side " + std::string(side_name(g.side)) +
                              " wires " + wires_text(g.wires);
    if (!keys.emplace(g.label, static_cast<int>(g.side), g.wires).second) {
      throw InvariantError(where + ": defined twice");
    }
    if (g.wires.empty()) throw InvariantError(where + ": no wires");
    std::set<std::size_t> distinct(g.wires.begin(), g.wires.end());
    if (distinct.size() != g.wires.size()) throw InvariantError(where + ": repeated wire");
    std::size_t d = 1;
    for (std::size_t w : g.wires) {
      if (w >= layout.n_wires) throw InvariantError(where + ": wire out of range");
      d *= layout.wire_dim(g.side, w);
    }
    if (g.unitary.rows() != static_cast<Eigen::Index>(d) || g.unitary.cols() != static_cast<Eigen::Index>(d)) {
      throw InvariantError(where + ": matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!is_unitary(g.unitary, tol.structural)) throw InvariantError(where + ": matrix is not unitary");
  }

  for (Side side : {Side::A, Side::B}) {
    for (std::size_t w = 0; w < layout.n_wires; ++w) {
      const auto count = std::count_if(frames.begin(), frames.end(), [&](const MeasurementFrame& f) {
        return f.side == side && f.wire == w;
      });
      const std::string where = "frame side " + std::string(side_name(side)) + " wire " + std::to_string(w);
      if (count != 1) throw InvariantError(where + ": expected exactly one frame, found " + std::to_string(count));
      const MeasurementFrame& f = frame(side, w);
      const auto d = static_cast<Eigen::Index>(layout.wire_dim(side, w));
      for (int k = 0; k < 3; ++k) {
        const std::string at = where + " angle " + Angle(k).label();
        const Matrix& p = f.primary[static_cast<std::size_t>(k)];
        if (p.rows() != d || p.cols() != d) throw InvariantError(at + ": projector has the wrong size");
        if (!is_projector(p, tol.structural)) {
          throw InvariantError(at + ": projector is not a Hermitian idempotent");
        }
      }
    }
  }
}

void set_gate(DeviceModel& device, DeviceGate gate) {
  for (DeviceGate& g : device.gates) {
    if (g.label == gate.label && g.side == gate.side && g.wires == gate.wires) {
      g = std::move(gate);
      return;
    }
  }
  device.gates.push_back(std::move(gate));
}

void set_frame(DeviceModel& device, MeasurementFrame frame) {
  for (MeasurementFrame& f : device.frames) {
    if (f.side == frame.side && f.wire == frame.wire) {
      f = std::move(frame);
      return;
    }
  }
  device.frames.push_back(std::move(frame));
}

void IdealCircuit::validate(const Tolerances& tol) const {
  if (n == 0) throw InvariantError("circuit: n must be at least 1");
  if (input.size() != n) throw InvariantError("circuit: input must have n bits");
  for (int b : input) {
    if (b != 0 && b != 1) throw InvariantError("circuit: input bits must be 0 or 1");
  }
  for (std::size_t j = 0; j < gates.size(); ++j) {
    const IdealGate& g = gates[j];
    const std::string where = "circuit gate " + std::to_string(j) + " ('" + g.label + "')";
    if (g.wires.empty() || g.wires.size() > 3) throw InvariantError(where + ": must act on 1 to 3 wires");
    std::set<std::size_t> distinct(g.wires.begin(), g.wires.end());
    if (distinct.size() != g.wires.size()) throw InvariantError(where + ": repeated wire");
    for (std::size_t w : g.wires) {
      if (w >= n) throw InvariantError(where + ": wire out of range");
    }
    const auto d = Eigen::Index{1} << g.wires.size();
    if (g.matrix.rows() != d || g.matrix.cols() != d) throw InvariantError(where + ": matrix has the wrong size");
    if ((g.matrix.transpose() * g.matrix - RealMatrix::Identity(d, d)).norm() > tol.golden) {
      throw InvariantError(where + ": matrix is not real orthogonal");
    }
  }
  for (std::size_t j = 0; j < gates.size(); ++j) {
    for (std::size_t k = j + 1; k < gates.size(); ++k) {
      if (gates[j].label == gates[k].label && gates[j].wires == gates[k].wires &&
          (gates[j].matrix - gates[k].matrix).norm() > 1e-12) {
        throw InvariantError("circuit: label '" + gates[j].label +
                             "' is reused on the same wires with a different matrix");
      }
    }
  }
}

std::string bits_to_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += b ? '1' : '0';
  return s;
}

std::vector<int> parse_bits(std::string_view text, std::size_t n) {
  if (text.size() != n) {
    throw std::invalid_argument("bit string '" + std::string(text) + "' must have " + std::to_string(n) +
                                " characters");
  }
  std::vector<int> bits;
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain 0 and 1");
    bits.push_back(c - '0');
  }
  return bits;
}

PhysState assemble_source(const RegisterLayout& layout, const std::vector<PhysState>& pairs) {
  if (pairs.size() != layout.n_wires) throw DimensionError("one pair state per wire expected");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::vector<std::size_t> want{layout.a_dims[i], layout.b_dims[i], layout.c_dims[i]};
    if (pairs[i].layout.dims() != want) {
      throw DimensionError("pair state " + std::to_string(i) + " does not match (A, B, C) dims");
    }
  }
  const PhysState joined = tensor(std::span<const PhysState>(pairs));
  const std::size_t n = layout.n_wires;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) order.push_back(3 * i);
  for (std::size_t i = 0; i < n; ++i) order.push_back(3 * i + 1);
  for (std::size_t i = 0; i < n; ++i) order.push_back(3 * i + 2);
  return permute(joined, order);
}

PhysState phi_plus() { return phi_plus_n(1); }

PhysState phi_plus_n(std::size_t k) {
  const std::size_t d = std::size_t{1} << k;
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d * d));
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t x = 0; x < d; ++x) v(static_cast<Eigen::Index>(x * d + x)) = amp;
  return PhysState(SubsystemDims(std::vector<std::size_t>(2 * k, 2)), std::move(v));
}

Matrix b_side_partner(const RealMatrix& t) { return t.cast<Complex>().conjugate(); }

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

namespace {

PhysState epr_pair(std::size_t c_dim = 1) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(4 * c_dim));
  const double h = 1.0 / std::sqrt(2.0);
  v(0) = h;                                           // |0,0,0>
  v(static_cast<Eigen::Index>(3 * c_dim)) = h;        // |1,1,0>
  return PhysState(SubsystemDims({2, 2, c_dim}), std::move(v));
}

MeasurementFrame ideal_frame(Side side, std::size_t wire) {
  MeasurementFrame f{side, wire, {}};
  for (int k = 0; k < 3; ++k) {
    f.primary[static_cast<std::size_t>(k)] = projector_matrix(Angle(k).radians()).cast<Complex>();
  }
  return f;
}

void add_not_gates(DeviceModel& d) {
  for (std::size_t w = 0; w < d.layout.n_wires; ++w) {
    set_gate(d, DeviceGate{"NOT", Side::A, {w}, pauli_x()});
    set_gate(d, DeviceGate{"NOT", Side::B, {w}, pauli_x()});
  }
}

Matrix wire_product(const std::vector<Matrix>& per_wire, const std::vector<std::size_t>& wires) {
  std::vector<Matrix> factors;
  for (std::size_t w : wires) factors.push_back(per_wire.at(w));
  return kron(std::span<const Matrix>(factors));
}

}  // namespace

DeviceModel honest_device(std::size_t n_wires) {
  IdealCircuit empty{n_wires, {}, std::vector<int>(n_wires, 0)};
  return honest_device(empty);
}

DeviceModel honest_device(const IdealCircuit& circuit) {
  DeviceModel d;
  d.name = "honest";
  d.description = "ideal qubits: EPR pairs, the circuit's gates, ideal angle projectors";
  d.layout = RegisterLayout::qubits(circuit.n);
  d.source_spec = SourceSpec{SourceKind::Epr, 0.0};
  d.source = assemble_source(d.layout, std::vector<PhysState>(circuit.n, epr_pair()));
  for (std::size_t w = 0; w < circuit.n; ++w) {
    d.frames.push_back(ideal_frame(Side::A, w));
    d.frames.push_back(ideal_frame(Side::B, w));
  }
  add_not_gates(d);
  for (const IdealGate& g : circuit.gates) {
    set_gate(d, DeviceGate{g.label, Side::A, g.wires, g.matrix.cast<Complex>()});
    set_gate(d, DeviceGate{g.label, Side::B, g.wires, b_side_partner(g.matrix)});
  }
  return d;
}

DeviceModel van_dam_device(const VanDamOptions& options) {
  if (options.frame_qubit > 1) throw std::invalid_argument("van Dam frame qubit must be 0 or 1");
  DeviceModel d;
  d.name = "vandam";
  d.description = "one wire hiding two qubits: 'H' swaps the second bit, readout reports a random bit";
  d.layout = RegisterLayout{1, {4}, {2}, {1}};
  d.source_spec = SourceSpec{SourceKind::Matrix, 0.0};

  // (|00>_A |0>_B + |11>_A |1>_B) / sqrt 2
  Vector src = Vector::Zero(8);
  src(0 * 2 + 0) = 1.0 / std::sqrt(2.0);
  src(3 * 2 + 1) = 1.0 / std::sqrt(2.0);
  d.source = PhysState(d.layout.full(), src);

  const Matrix id2 = Matrix::Identity(2, 2);
  MeasurementFrame fa{Side::A, 0, {}};
  Matrix p0 = Matrix::Zero(4, 4);
  p0(0, 0) = 1.0;
  p0.block(1, 1, 2, 2) = Matrix::Constant(2, 2, 0.5);
  fa.primary[0] = p0;
  for (int k = 1; k < 3; ++k) {
    const Matrix q = projector_matrix(Angle(k).radians()).cast<Complex>();
    fa.primary[static_cast<std::size_t>(k)] = options.frame_qubit == 0 ? kron(q, id2) : kron(id2, q);
  }
  d.frames.push_back(fa);
  d.frames.push_back(ideal_frame(Side::B, 0));

  const Matrix hadamard = (Matrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  set_gate(d, DeviceGate{"H", Side::A, {0}, kron(id2, pauli_x())});
  set_gate(d, DeviceGate{"H", Side::B, {0}, hadamard});
  set_gate(d, DeviceGate{"NOT", Side::A, {0}, kron(pauli_x(), pauli_x())});
  set_gate(d, DeviceGate{"NOT", Side::B, {0}, pauli_x()});
  return d;
}

DeviceModel rotated_device(const IdealCircuit& circuit, const std::vector<Matrix>& v_a,
                           const std::vector<Matrix>& v_b) {
  if (v_a.size() != circuit.n || v_b.size() != circuit.n) {
    throw std::invalid_argument("rotated device: one 2x2 unitary per wire and side expected");
  }
  for (const Matrix& v : v_a) {
    if (v.rows() != 2 || !is_unitary(v, 1e-10)) throw InvariantError("rotated device: v_a is not a 2x2 unitary");
  }
  for (const Matrix& v : v_b) {
    if (v.rows() != 2 || !is_unitary(v, 1e-10)) throw InvariantError("rotated device: v_b is not a 2x2 unitary");
  }
  DeviceModel d = honest_device(circuit);
  d.name = "rotated";
  d.description = "honest device seen through fixed local unitaries on every wire";
  d.source_spec = SourceSpec{SourceKind::Matrix, 0.0};
  for (std::size_t w = 0; w < circuit.n; ++w) {
    apply_local(v_a[w], std::vector<std::size_t>{d.layout.subsystem(Side::A, w)}, d.source.layout,
                d.source.amplitudes);
    apply_local(v_b[w], std::vector<std::size_t>{d.layout.subsystem(Side::B, w)}, d.source.layout,
                d.source.amplitudes);
  }
  for (DeviceGate& g : d.gates) {
    const Matrix v = wire_product(g.side == Side::A ? v_a : v_b, g.wires);
    g.unitary = v * g.unitary * v.adjoint();
  }
  for (MeasurementFrame& f : d.frames) {
    const Matrix& v = (f.side == Side::A ? v_a : v_b)[f.wire];
    for (Matrix& p : f.primary) p = v * p * v.adjoint();
  }
  return d;
}

DeviceModel rotated_device(const IdealCircuit& circuit, double theta) {
  Matrix phase = Matrix::Identity(2, 2);
  phase(1, 1) = std::polar(1.0, theta);
  DeviceModel d = rotated_device(circuit, std::vector<Matrix>(circuit.n, rotation(theta)),
                                 std::vector<Matrix>(circuit.n, phase));
  d.description = "honest device with A frames rotated by theta and B frames phased by theta";
  return d;
}

PhysState depolarized_pair(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarizing weight p must lie in [0, 1]");
  // eigen-decomposition of (1-p)|phi+><phi+| + p Id/4 over the Bell basis
  const double h = 1.0 / std::sqrt(2.0);
  const std::array<std::array<double, 4>, 4> bell{{
      {h, 0, 0, h},    // phi+
      {h, 0, 0, -h},   // phi-
      {0, h, h, 0},    // psi+
      {0, h, -h, 0},   // psi-
  }};
  const std::array<double, 4> weight{1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p};
  Vector v = Vector::Zero(16);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t ab = 0; ab < 4; ++ab) {
      v(static_cast<Eigen::Index>(ab * 4 + k)) = std::sqrt(weight[k]) * bell[k][ab];
    }
  }
  return PhysState(SubsystemDims({2, 2, 4}), std::move(v));
}

DeviceModel noisy_source_device(const IdealCircuit& circuit, double p) {
  DeviceModel d = with_source(honest_device(circuit), std::vector<PhysState>(circuit.n, depolarized_pair(p)));
  d.name = "depolarized";
  d.description = "honest gates and frames, each pair mixed with white noise of weight p";
  d.source_spec = SourceSpec{SourceKind::Depolarized, p};
  return d;
}

DeviceModel classical_source_device(const IdealCircuit& circuit) {
  Vector v = Vector::Zero(8);
  v(0) = 1.0 / std::sqrt(2.0);
  v(7) = 1.0 / std::sqrt(2.0);
  const PhysState pair(SubsystemDims({2, 2, 2}), v);
  DeviceModel d = with_source(honest_device(circuit), std::vector<PhysState>(circuit.n, pair));
  d.name = "classical";
  d.description = "honest gates and frames, pairs only classically correlated in the 0/1 basis";
  return d;
}

DeviceModel with_source(const DeviceModel& device, const std::vector<PhysState>& pairs) {
  DeviceModel d = device;
  if (pairs.size() != d.layout.n_wires) throw DimensionError("one pair state per wire expected");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].layout.size() != 3) throw DimensionError("pair states are laid out as (A, B, C)");
    d.layout.c_dims[i] = pairs[i].layout.dim(2);
  }
  d.source = assemble_source(d.layout, pairs);
  d.source_spec = SourceSpec{SourceKind::Matrix, 0.0};
  return d;
}

}  // namespace selftest
