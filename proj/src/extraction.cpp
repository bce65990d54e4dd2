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

#include "selftest/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace selftest {

LogicalExtension::LogicalExtension(SubsystemDims base_dims)
    : base(std::move(base_dims)), extended(SubsystemDims({2}).concat(base)) {}

PhysState LogicalExtension::inject(const PhysState& x) const {
  if (!(x.layout == base)) throw DimensionError("state does not live on the base space");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(extended.total_dim()));
  v.head(x.amplitudes.size()) = x.amplitudes;
  return PhysState(extended, std::move(v));
}

PhysState LogicalExtension::project(const PhysState& y) const {
  if (!(y.layout == extended)) throw DimensionError("state does not live on the extended space");
  return PhysState(base, y.amplitudes.head(static_cast<Eigen::Index>(base.total_dim())));
}

Matrix build_not(const DeviceModel& device, Side side, std::size_t wire, const Tolerances& tol) {
  const Matrix p = device.frame(side, wire).projector(kAnglePi4);
  if (!is_projector(p, tol.structural)) {
    throw InvariantError("frame side " + std::string(side_name(side)) + " wire " + std::to_string(wire) +
                         ": pi/4 projector is not a Hermitian idempotent");
  }
  return 2.0 * p - Matrix::Identity(p.rows(), p.cols());
}

Matrix build_swap_extraction(const DeviceModel& device, Side side, std::size_t wire, const Tolerances& tol) {
  const MeasurementFrame& f = device.frame(side, wire);
  const Matrix p0 = f.projector(kAngle0);
  const Matrix p1 = f.projector(kAnglePi2);
  const Matrix n = build_not(device, side, wire, tol);
  const Eigen::Index d = p0.rows();
  Matrix ket0 = Matrix::Zero(2, 2);
  ket0(0, 0) = 1.0;
  Matrix ket1 = Matrix::Zero(2, 2);
  ket1(1, 1) = 1.0;
  const Matrix controlled_not_on_wire = kron(ket0, Matrix::Identity(d, d)) + kron(ket1, n);
  const Matrix controlled_not_on_logical = kron(Matrix::Identity(2, 2), p0) + kron(pauli_x(), p1);
  Matrix u = controlled_not_on_wire * controlled_not_on_logical;
  if (!is_unitary(u, 1e-8)) throw InvariantError("extraction unitary is not unitary");
  return u;
}

double EquivalenceReport::max_residual() const {
  double m = std::max(state_residual, max_projector_residual);
  if (gate_residual) m = std::max(m, *gate_residual);
  return m;
}

namespace {

/// Device layout with k logical A qubits and k logical B qubits in front.
struct Extended {
  std::vector<std::size_t> wires;
  SubsystemDims orig;
  SubsystemDims ext;
  Eigen::Index orig_dim = 0;
  std::vector<LocalOperator> ua;
  std::vector<LocalOperator> ub;

  Extended(const DeviceModel& device, const SubsystemDims& orig_layout, std::vector<std::size_t> w,
           const Tolerances& tol)
      : wires(std::move(w)), orig(orig_layout) {
    const std::size_t k = wires.size();
    ext = SubsystemDims(std::vector<std::size_t>(2 * k, 2)).concat(orig);
    orig_dim = static_cast<Eigen::Index>(orig.total_dim());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t w_i = wires[i];
      ua.push_back(LocalOperator{{i, 2 * k + device.layout.subsystem(Side::A, w_i)},
                                 build_swap_extraction(device, Side::A, w_i, tol), OperatorKind::Unitary});
      ub.push_back(LocalOperator{{k + i, 2 * k + device.layout.subsystem(Side::B, w_i)},
                                 build_swap_extraction(device, Side::B, w_i, tol), OperatorKind::Unitary});
    }
  }

  std::size_t k() const { return wires.size(); }

  Vector inject(const Vector& x) const {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(ext.total_dim()));
    v.head(orig_dim) = x;
    return v;
  }
  Vector project(const Vector& v) const { return v.head(orig_dim); }

  void apply(const std::vector<LocalOperator>& ops, Vector& v) const {
    for (const LocalOperator& op : ops) apply_local(op.matrix, op.targets, ext, v);
  }
  void apply_adjoint(const std::vector<LocalOperator>& ops, Vector& v) const {
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) apply_local(it->matrix.adjoint(), it->targets, ext, v);
  }
};

std::vector<std::pair<Matrix, Matrix>> generator_pairs(const DeviceModel& device, std::size_t wire, bool reduced) {
  std::vector<std::pair<Matrix, Matrix>> out;
  const MeasurementFrame& fa = device.frame(Side::A, wire);
  const MeasurementFrame& fb = device.frame(Side::B, wire);
  if (!reduced) {
    for (Angle a : kAllAngles) {
      for (Angle b : kAllAngles) out.emplace_back(fa.projector(a), fb.projector(b));
    }
    return out;
  }
  std::vector<Matrix> la{Matrix::Identity(fa.primary[0].rows(), fa.primary[0].cols())};
  std::vector<Matrix> lb{Matrix::Identity(fb.primary[0].rows(), fb.primary[0].cols())};
  for (Angle a : kFrameAngles) {
    la.push_back(fa.projector(a));
    lb.push_back(fb.projector(a));
  }
  for (const Matrix& a : la) {
    for (const Matrix& b : lb) out.emplace_back(a, b);
  }
  return out;
}

Matrix columns(const std::vector<Vector>& vs) {
  Matrix m(vs.empty() ? 0 : vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  return m;
}

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

EquivalenceReport certify_state_equivalence(const DeviceModel& device, const PhysState& state,
                                            const std::vector<std::size_t>& wires, const Tolerances& tol) {
  if (wires.empty()) throw std::invalid_argument("certify_state_equivalence needs at least one wire");
  if (!(state.layout == device.layout.full())) throw DimensionError("state does not match the device layout");
  const Extended x(device, state.layout, wires, tol);
  const std::size_t k = x.k();

  EquivalenceReport rep;
  rep.wires = wires;
  rep.extended_layout = x.ext;
  rep.u_bar_a = x.ua;
  rep.u_bar_b = x.ub;

  // S, built wire by wire; each level is deflated before the next
  const bool reduced = k > 2;
  std::vector<Vector> current{state.amplitudes};
  for (std::size_t level = 0; level < k; ++level) {
    const std::size_t w = wires[level];
    const std::vector<std::size_t> ta{device.layout.subsystem(Side::A, w)};
    const std::vector<std::size_t> tb{device.layout.subsystem(Side::B, w)};
    std::vector<Vector> gens;
    for (const auto& [pa, pb] : generator_pairs(device, w, reduced)) {
      for (const Vector& v : current) {
        Vector g = v;
        apply_local(pa, ta, state.layout, g);
        apply_local(pb, tb, state.layout, g);
        gens.push_back(std::move(g));
      }
    }
    const SubspaceBasis raw = make_basis(state.layout, std::move(gens));
    if (level + 1 == k) {
      rep.s_generators = raw.vectors.size();
      rep.s_singular_values = singular_profile(raw);
    }
    SubspaceBasis on = orthonormalize(raw, tol);
    current = on.vectors;
    if (level + 1 == k) rep.s_basis = std::move(on);
  }

  // state residual against |Phi+>_{logical} (x) chi with the optimal chi
  Vector v = x.inject(state.amplitudes);
  x.apply(x.ua, v);
  x.apply(x.ub, v);
  const std::size_t dk = std::size_t{1} << k;
  Vector chi = Vector::Zero(x.orig_dim);
  for (std::size_t s = 0; s < dk; ++s) chi += v.segment(static_cast<Eigen::Index>(s * dk + s) * x.orig_dim, x.orig_dim);
  chi /= std::sqrt(static_cast<double>(dk));
  Vector ideal = Vector::Zero(v.size());
  for (std::size_t s = 0; s < dk; ++s) {
    ideal.segment(static_cast<Eigen::Index>(s * dk + s) * x.orig_dim, x.orig_dim) = chi / std::sqrt(static_cast<double>(dk));
  }
  rep.state_residual = (v - ideal).norm();
  rep.chi_norm = chi.norm();

  // projector residuals P^a against P U^dag (|a><a| (x) Id) U I
  for (std::size_t i = 0; i < k; ++i) {
    for (Side side : {Side::A, Side::B}) {
      const std::size_t logical = side == Side::A ? i : k + i;
      for (Angle a : kAllAngles) {
        const LocalOperator phys = device.projector(side, wires[i], a);
        const RealMatrix ideal_p = projector_matrix(a.radians());
        const StateMap m = [&](const PhysState& s) { return apply(phys, s); };
        const StateMap n = [&](const PhysState& s) {
          Vector e = x.inject(s.amplitudes);
          x.apply(x.ua, e);
          x.apply(x.ub, e);
          apply_local(ideal_p, std::vector<std::size_t>{logical}, x.ext, e);
          x.apply_adjoint(x.ub, e);
          x.apply_adjoint(x.ua, e);
          return PhysState(s.layout, x.project(e));
        };
        const double r = op_norm_on(rep.s_basis, m, n, tol);
        rep.projector_residuals.push_back(ProjectorResidual{side, wires[i], a, r});
        rep.max_projector_residual = std::max(rep.max_projector_residual, r);
      }
    }
  }
  return rep;
}

EquivalenceReport certify_gate_equivalence(const DeviceModel& device, const IdealCircuit& circuit,
                                           std::size_t step, const Tolerances& tol) {
  if (step < 1 || step > circuit.gates.size()) {
    throw std::invalid_argument("gate index must lie in 1.." + std::to_string(circuit.gates.size()));
  }
  const IdealGate& g = circuit.gates[step - 1];
  std::vector<GateRef> pre_prep;
  for (std::size_t j = 0; j + 1 < step; ++j) {
    pre_prep.push_back(GateRef{circuit.gates[j].label, Side::A, circuit.gates[j].wires});
    pre_prep.push_back(GateRef{circuit.gates[j].label, Side::B, circuit.gates[j].wires});
  }
  std::vector<GateRef> post_prep = pre_prep;
  post_prep.push_back(GateRef{g.label, Side::A, g.wires});
  post_prep.push_back(GateRef{g.label, Side::B, g.wires});
  const PhysState pre = prepare(device, pre_prep);
  const PhysState post = prepare(device, post_prep);

  EquivalenceReport rep = certify_state_equivalence(device, pre, g.wires, tol);
  const EquivalenceReport post_rep = certify_state_equivalence(device, post, g.wires, tol);
  rep.gate_label = g.label;
  rep.post_state_residual = post_rep.state_residual;

  const Extended x(device, pre.layout, g.wires, tol);
  std::vector<LocalOperator> va = post_rep.u_bar_a;  // built from the post-gate frames
  const LocalOperator gate = device.gate_operator(GateRef{g.label, Side::A, g.wires});
  const std::size_t k = g.wires.size();
  const auto dk = Eigen::Index{1} << k;
  const Eigen::Index rest = static_cast<Eigen::Index>(x.ext.total_dim()) / dk;
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Matrix t = g.matrix.cast<Complex>();

  // blocks over the logical A qubits: row i of each reshaped vector
  std::vector<RowMajor> right_blocks;
  std::vector<RowMajor> left_blocks;
  std::vector<Vector> block_rows;
  for (const Vector& s : rep.s_basis.vectors) {
    Vector r = x.inject(s);
    x.apply(x.ua, r);
    x.apply(x.ub, r);
    Vector gs = s;
    apply_local(gate.matrix, gate.targets, pre.layout, gs);
    Vector l = x.inject(gs);
    x.apply(va, l);
    x.apply(x.ub, l);
    RowMajor rm = Eigen::Map<RowMajor>(r.data(), dk, rest);
    RowMajor lm = t.transpose() * Eigen::Map<RowMajor>(l.data(), dk, rest);
    for (Eigen::Index i = 0; i < dk; ++i) block_rows.push_back(rm.row(i).transpose());
    right_blocks.push_back(std::move(rm));
    left_blocks.push_back(std::move(lm));
  }
  const SubspaceBasis d2 = orthonormalize(make_basis(SubsystemDims({static_cast<std::size_t>(rest)}), block_rows), tol);
  rep.w_rank = d2.rank;
  const Matrix q = columns(d2.vectors);

  // W' Q with W' = sum over blocks of l r^H, then its polar factor
  Matrix wq = Matrix::Zero(rest, q.cols());
  for (std::size_t s = 0; s < right_blocks.size(); ++s) {
    const Matrix r = right_blocks[s].transpose();  // rest x dk, columns are blocks
    const Matrix l = left_blocks[s].transpose();
    wq += l * (r.adjoint() * q);
  }
  Eigen::JacobiSVD<Matrix> svd(wq, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (q.cols() == 0 || sv.size() == 0 || sv(sv.size() - 1) < 1e-9 * std::max(1.0, sv(0))) {
    rep.gate_residual = 2.0;
    rep.factor_residual = 2.0;
    return rep;
  }
  const Matrix w_on_d2 = svd.matrixU() * svd.matrixV().adjoint() * q.adjoint();  // rest x rest

  std::vector<Vector> mismatch;
  for (std::size_t s = 0; s < right_blocks.size(); ++s) {
    const RowMajor mapped = right_blocks[s] * w_on_d2.transpose();
    const RowMajor diff = mapped - left_blocks[s];
    mismatch.push_back(Eigen::Map<const Vector>(diff.data(), diff.size()));
  }
  rep.factor_residual = largest_singular_value(columns(mismatch));

  const StateMap m = [&](const PhysState& s) { return apply(gate, s); };
  const StateMap n = [&](const PhysState& s) {
    Vector e = x.inject(s.amplitudes);
    x.apply(x.ua, e);
    x.apply(x.ub, e);
    RowMajor blocks = Eigen::Map<RowMajor>(e.data(), dk, rest);
    RowMajor out = t * blocks * w_on_d2.transpose();
    Vector f = Eigen::Map<const Vector>(out.data(), out.size());
    x.apply_adjoint(x.ub, f);
    x.apply_adjoint(va, f);
    return PhysState(s.layout, x.project(f));
  };
  rep.gate_residual = op_norm_on(rep.s_basis, m, n, tol);
  return rep;
}

namespace {

/// {I, X, Z}^n words as real matrices, in lexicographic order.
std::vector<RealMatrix> ixz_words(std::size_t n) {
  RealMatrix id = RealMatrix::Identity(2, 2);
  RealMatrix px(2, 2);
  px << 0, 1, 1, 0;
  RealMatrix pz(2, 2);
  pz << 1, 0, 0, -1;
  const std::array<RealMatrix, 3> single{id, px, pz};
  std::vector<RealMatrix> words{RealMatrix::Identity(1, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<RealMatrix> next;
    for (const RealMatrix& w : words) {
      for (const RealMatrix& s : single) next.push_back(kron(w, s));
    }
    words = std::move(next);
  }
  return words;
}

/// Coefficients expressing I, X, Z through the projectors at 0, pi/4, pi/2.
constexpr double kWordWeights[3][3] = {
    {1.0, 0.0, 1.0},    // I = P0 + P(pi/2)
    {-1.0, 2.0, -1.0},  // X = 2 P(pi/4) - P0 - P(pi/2)
    {1.0, 0.0, -1.0},   // Z = P0 - P(pi/2)
};

struct PureFit : Eigen::DenseFunctor<double> {
  const std::vector<RealMatrix>* words;
  Eigen::VectorXd target;

  PureFit(const std::vector<RealMatrix>& w, Eigen::VectorXd t, int inputs)
      : DenseFunctor<double>(inputs, static_cast<int>(w.size())), words(&w), target(std::move(t)) {}

  int operator()(const Eigen::VectorXd& g, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < words->size(); ++i) {
      f(static_cast<Eigen::Index>(i)) = g.dot((*words)[i] * g) - target(static_cast<Eigen::Index>(i));
    }
    return 0;
  }
  int df(const Eigen::VectorXd& g, Eigen::MatrixXd& jac) const {
    for (std::size_t i = 0; i < words->size(); ++i) {
      jac.row(static_cast<Eigen::Index>(i)) = 2.0 * ((*words)[i] * g).transpose();
    }
    return 0;
  }
};

}  // namespace

Matrix observable_part(const Matrix& rho, std::size_t n) {
  const double scale = std::ldexp(1.0, -static_cast<int>(n));
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const RealMatrix& w : ixz_words(n)) {
    const Matrix wc = w.cast<Complex>();
    out += (wc * rho).trace() * scale * wc;
  }
  return out;
}

Matrix tomo_reconstruct(const std::map<std::vector<Angle>, double>& stats, std::size_t n) {
  if (n < 1 || n > 3) throw std::invalid_argument("tomo_reconstruct supports 1 to 3 qubits");
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;

  // probabilities indexed by base-3 digits over (0, pi/4, pi/2)
  std::vector<double> prob(combos);
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<Angle> key(n);
    std::size_t rest = c;
    for (std::size_t i = n; i-- > 0;) {
      key[i] = kTomographyAngles[rest % 3];
      rest /= 3;
    }
    const auto it = stats.find(key);
    if (it == stats.end()) {
      std::string label;
      for (Angle a : key) label += (label.empty() ? "" : ",") + a.label();
      throw std::invalid_argument("tomography statistics missing for (" + label + ")");
    }
    prob[c] = it->second;
  }

  const std::vector<RealMatrix> words = ixz_words(n);
  Eigen::VectorXd coeff(static_cast<Eigen::Index>(combos));  // tr(P rho) per word
  for (std::size_t w = 0; w < combos; ++w) {
    double acc = 0.0;
    for (std::size_t c = 0; c < combos; ++c) {
      double weight = 1.0;
      std::size_t wd = w;
      std::size_t cd = c;
      for (std::size_t i = 0; i < n; ++i) {
        weight *= kWordWeights[wd % 3][cd % 3];
        wd /= 3;
        cd /= 3;
      }
      acc += weight * prob[c];
    }
    coeff(static_cast<Eigen::Index>(w)) = acc;
  }
  const double scale = std::ldexp(1.0, -static_cast<int>(n));
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  RealMatrix observed = RealMatrix::Zero(d, d);
  for (std::size_t w = 0; w < combos; ++w) observed += coeff(static_cast<Eigen::Index>(w)) * scale * words[w];
  if (n == 1) return observed.cast<Complex>();

  // fill the unobservable even-Y part from the best-fitting real pure state
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(observed);
  std::vector<Eigen::VectorXd> starts;
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = std::max(ev(d - 1), 1e-12);
  for (Eigen::Index i = d; i-- > 0;) starts.push_back(std::sqrt(top) * es.eigenvectors().col(i));
  for (Eigen::Index i = d - 1; i-- > 0;) {
    starts.push_back(std::sqrt(top / 2) * (es.eigenvectors().col(d - 1) + es.eigenvectors().col(i)));
    starts.push_back(std::sqrt(top / 2) * (es.eigenvectors().col(d - 1) - es.eigenvectors().col(i)));
  }
  PureFit fit(words, coeff, static_cast<int>(d));
  Eigen::VectorXd best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (Eigen::VectorXd g : starts) {
    Eigen::LevenbergMarquardt<PureFit> lm(fit);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setGtol(0.0);
    lm.setMaxfev(2000);
    lm.minimize(g);
    Eigen::VectorXd f(static_cast<Eigen::Index>(combos));
    fit(g, f);
    if (f.squaredNorm() < best_cost) {
      best_cost = f.squaredNorm();
      best = g;
    }
    if (best_cost < 1e-28) break;
  }
  const RealMatrix pure = best * best.transpose();
  const RealMatrix pure_observed = observable_part(pure.cast<Complex>(), n).real();
  return (observed + pure - pure_observed).cast<Complex>();
}

CommutantFactor commutant_factor(const Matrix& u, std::size_t n) {
  const auto d1 = Eigen::Index{1} << n;
  if (u.rows() != u.cols() || u.rows() % d1 != 0) throw DimensionError("unitary size is not a multiple of 2^n");
  const Eigen::Index d2 = u.rows() / d1;
  Matrix avg = Matrix::Zero(d2, d2);
  for (Eigen::Index i = 0; i < d1; ++i) avg += u.block(i * d2, i * d2, d2, d2);
  avg /= static_cast<double>(d1);
  Eigen::JacobiSVD<Matrix> svd(avg, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CommutantFactor out;
  out.min_singular = svd.singularValues()(d2 - 1);
  if (out.min_singular < 1e-9) return out;  // singular: no W, residual stays 2
  const Matrix w = svd.matrixU() * svd.matrixV().adjoint();
  Eigen::JacobiSVD<Matrix> diff(u - kron(Matrix(Matrix::Identity(d1, d1)), w));
  out.residual = diff.singularValues()(0);
  out.w = w;
  return out;
}

CollapseReport check_collapse_symmetry(const DeviceModel& device, const PhysState& state, std::size_t wire) {
  CollapseReport rep;
  for (Angle a : kAllAngles) {
    const PhysState pa = apply(device.projector(Side::A, wire, a), state);
    const PhysState pb = apply(device.projector(Side::B, wire, a), state);
    const PhysState pab = apply(device.projector(Side::B, wire, a), pa);
    rep.max_side_difference = std::max(rep.max_side_difference, dist(pa, pb));
    rep.max_joint_difference = std::max(rep.max_joint_difference, dist(pa, pab));
  }
  return rep;
}

namespace {

std::array<Vector, 4> geometry_vectors(const std::function<Vector(Angle, Angle)>& make, Angle alpha, Angle beta) {
  return {make(alpha, beta), make(alpha, beta.complement()), make(alpha.complement(), beta),
          make(alpha.complement(), beta.complement())};
}

Matrix basis_change(const std::array<Vector, 4>& from, const std::array<Vector, 4>& to) {
  Matrix f(from[0].size(), 4);
  Matrix t(to[0].size(), 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    f.col(i) = from[static_cast<std::size_t>(i)];
    t.col(i) = to[static_cast<std::size_t>(i)];
  }
  return f.completeOrthogonalDecomposition().solve(t);
}

}  // namespace

BasisGeometryReport check_basis_geometry(const DeviceModel& device, const PhysState& state, std::size_t wire,
                                         Angle alpha, Angle beta, Angle alpha2, Angle beta2) {
  if (alpha == beta || alpha2 == beta2) throw std::invalid_argument("basis geometry needs alpha != beta");
  const auto physical = [&](Angle a, Angle b) {
    PhysState s = apply(device.projector(Side::A, wire, a), state);
    return apply(device.projector(Side::B, wire, b), s).amplitudes;
  };
  const PhysState epr = phi_plus();
  const auto ideal = [&](Angle a, Angle b) {
    Vector v = epr.amplitudes;
    apply_local(projector_matrix(a.radians()), std::vector<std::size_t>{0}, epr.layout, v);
    apply_local(projector_matrix(b.radians()), std::vector<std::size_t>{1}, epr.layout, v);
    return v;
  };
  const auto phys_from = geometry_vectors(physical, alpha, beta);
  const auto phys_to = geometry_vectors(physical, alpha2, beta2);
  const auto ideal_from = geometry_vectors(ideal, alpha, beta);
  const auto ideal_to = geometry_vectors(ideal, alpha2, beta2);

  BasisGeometryReport rep;
  for (std::size_t i = 0; i < 4; ++i) {
    rep.lengths[i] = phys_from[i].norm();
    rep.ideal_lengths[i] = ideal_from[i].norm();
    if (rep.lengths[i] < 1e-14) throw InvariantError("basis geometry: a projected vector has zero length");
    rep.max_length_error = std::max(rep.max_length_error, std::abs(rep.lengths[i] - rep.ideal_lengths[i]));
    for (std::size_t j = i + 1; j < 4; ++j) {
      rep.max_off_diagonal = std::max(rep.max_off_diagonal, std::abs(phys_from[i].dot(phys_from[j])));
    }
  }
  rep.basis_change = basis_change(phys_from, phys_to);
  rep.ideal_basis_change = basis_change(ideal_from, ideal_to);
  rep.max_basis_change_error = (rep.basis_change - rep.ideal_basis_change).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace selftest
