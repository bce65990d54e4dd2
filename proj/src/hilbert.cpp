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

#include "selftest/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace selftest {

SubsystemDims::SubsystemDims(std::vector<std::size_t> dims, std::size_t cap)
    : dims_(std::move(dims)), cap_(cap) {
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    if (dims_[i] == 0) throw DimensionError("subsystem " + std::to_string(i) + " has dimension 0");
    strides_[i] = total_;
    if (total_ > cap_ / dims_[i]) {
      throw DimensionError("total dimension exceeds the cap of " + std::to_string(cap_) +
                           " amplitudes");
    }
    total_ *= dims_[i];
  }
}

std::size_t SubsystemDims::dim_of(std::span<const std::size_t> targets) const {
  std::size_t d = 1;
  for (std::size_t t : targets) d *= dim(t);
  return d;
}

SubsystemDims SubsystemDims::concat(const SubsystemDims& other) const {
  std::vector<std::size_t> joined = dims_;
  joined.insert(joined.end(), other.dims_.begin(), other.dims_.end());
  return SubsystemDims(std::move(joined), std::max(cap_, other.cap_));
}

SubsystemDims SubsystemDims::permuted(std::span<const std::size_t> order) const {
  if (order.size() != dims_.size()) throw DimensionError("permutation has the wrong length");
  std::vector<bool> seen(dims_.size(), false);
  std::vector<std::size_t> out;
  out.reserve(order.size());
  for (std::size_t o : order) {
    if (o >= dims_.size() || seen[o]) throw DimensionError("invalid subsystem permutation");
    seen[o] = true;
    out.push_back(dims_[o]);
  }
  return SubsystemDims(std::move(out), cap_);
}

PhysState::PhysState(SubsystemDims dims, Vector amps)
    : layout(std::move(dims)), amplitudes(std::move(amps)) {
  if (static_cast<std::size_t>(amplitudes.size()) != layout.total_dim()) {
    throw DimensionError("amplitude vector has length " + std::to_string(amplitudes.size()) +
                         ", layout needs " + std::to_string(layout.total_dim()));
  }
}

PhysState PhysState::basis(const SubsystemDims& dims, std::size_t index) {
  if (index >= dims.total_dim()) throw DimensionError("basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total_dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PhysState(dims, std::move(v));
}

PhysState PhysState::basis(const SubsystemDims& dims, std::span<const std::size_t> digits) {
  if (digits.size() != dims.size()) throw DimensionError("one digit per subsystem expected");
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] >= dims.dim(i)) throw DimensionError("digit out of range");
    index += digits[i] * dims.stride(i);
  }
  return basis(dims, index);
}

PhysState PhysState::normalized() const {
  const double n = amplitudes.norm();
  if (n == 0.0) throw InvariantError("cannot normalize the zero vector");
  return PhysState(layout, amplitudes / n);
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const Matrix gram = m.adjoint() * m;
  return (gram - Matrix::Identity(m.rows(), m.cols())).norm() <= tol;
}

bool is_projector(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol && (m * m - m).norm() <= tol;
}

void validate(const LocalOperator& op, const SubsystemDims& layout, const Tolerances& tol) {
  std::vector<std::size_t> sorted = op.targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DimensionError("duplicate target subsystem");
  }
  for (std::size_t t : op.targets) {
    if (t >= layout.size()) {
      throw DimensionError("target subsystem " + std::to_string(t) + " out of range (layout has " +
                           std::to_string(layout.size()) + ")");
    }
  }
  const auto d = static_cast<Eigen::Index>(layout.dim_of(op.targets));
  if (op.matrix.rows() != d || op.matrix.cols() != d) {
    throw DimensionError("operator matrix is " + std::to_string(op.matrix.rows()) + "x" +
                         std::to_string(op.matrix.cols()) + ", targets need " + std::to_string(d));
  }
  if (op.kind == OperatorKind::Unitary && !is_unitary(op.matrix, tol.structural)) {
    throw InvariantError("operator flagged unitary is not unitary");
  }
  if (op.kind == OperatorKind::Projector && !is_projector(op.matrix, tol.structural)) {
    throw InvariantError("operator flagged projector is not a Hermitian idempotent");
  }
}

Matrix kron(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const Matrix& f : factors) out = kron(out, f);
  return out;
}

PhysState tensor(const PhysState& a, const PhysState& b) {
  SubsystemDims layout = a.layout.concat(b.layout);
  return PhysState(std::move(layout), kron(a.amplitudes, b.amplitudes));
}

PhysState tensor(std::span<const PhysState> states) {
  if (states.empty()) return PhysState(SubsystemDims(), Vector::Ones(1));
  PhysState out = states.front();
  for (std::size_t i = 1; i < states.size(); ++i) out = tensor(out, states[i]);
  return out;
}

LocalOperator tensor(const LocalOperator& a, const LocalOperator& b) {
  LocalOperator out;
  out.targets = a.targets;
  const std::size_t shift =
      a.targets.empty() ? 0 : *std::max_element(a.targets.begin(), a.targets.end()) + 1;
  for (std::size_t t : b.targets) out.targets.push_back(t + shift);
  out.matrix = kron(a.matrix, b.matrix);
  out.kind = (a.kind == b.kind) ? a.kind : OperatorKind::General;
  return out;
}

PhysState permute(const PhysState& x, std::span<const std::size_t> order) {
  const SubsystemDims& old_layout = x.layout;
  SubsystemDims new_layout = old_layout.permuted(order);
  Vector out(x.amplitudes.size());
  const std::size_t n = old_layout.size();
  std::vector<std::size_t> digits(n, 0);  // over the new layout
  const std::size_t total = old_layout.total_dim();
  for (std::size_t new_index = 0; new_index < total; ++new_index) {
    std::size_t old_index = 0;
    for (std::size_t k = 0; k < n; ++k) old_index += digits[k] * old_layout.stride(order[k]);
    out(static_cast<Eigen::Index>(new_index)) = x.amplitudes(static_cast<Eigen::Index>(old_index));
    for (std::size_t k = n; k-- > 0;) {
      if (++digits[k] < new_layout.dim(k)) break;
      digits[k] = 0;
    }
  }
  return PhysState(std::move(new_layout), std::move(out));
}

namespace detail {

namespace {
std::vector<std::size_t> enumerate_offsets(std::span<const std::size_t> subsystems,
                                           const SubsystemDims& layout) {
  std::vector<std::size_t> offsets{0};
  for (std::size_t s : subsystems) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * layout.dim(s));
    for (std::size_t base : offsets) {
      for (std::size_t d = 0; d < layout.dim(s); ++d) next.push_back(base + d * layout.stride(s));
    }
    offsets = std::move(next);
  }
  return offsets;
}
}  // namespace

IndexPlan plan_indices(std::span<const std::size_t> targets, const SubsystemDims& layout) {
  std::vector<bool> is_target(layout.size(), false);
  for (std::size_t t : targets) {
    if (t >= layout.size()) throw DimensionError("target subsystem " + std::to_string(t) + " out of range");
    if (is_target[t]) throw DimensionError("duplicate target subsystem " + std::to_string(t));
    is_target[t] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (!is_target[i]) rest.push_back(i);
  }
  return IndexPlan{enumerate_offsets(targets, layout), enumerate_offsets(rest, layout)};
}

}  // namespace detail

PhysState apply(const LocalOperator& op, const PhysState& x) {
  PhysState out = x;
  apply_local(op.matrix, op.targets, out.layout, out.amplitudes);
  return out;
}

EmbeddedOperator::EmbeddedOperator(LocalOperator op, SubsystemDims layout, const Tolerances& tol)
    : op_(std::move(op)), layout_(std::move(layout)) {
  validate(op_, layout_, tol);
}

PhysState EmbeddedOperator::operator()(const PhysState& x) const {
  if (!(x.layout == layout_)) throw DimensionError("state layout does not match operator layout");
  return apply(op_, x);
}

EmbeddedOperator embed(const LocalOperator& op, const SubsystemDims& layout,
                       const Tolerances& tol) {
  return EmbeddedOperator(op, layout, tol);
}

PhysState angle_state(double a) {
  Vector v(2);
  v << std::cos(a), std::sin(a);
  return PhysState(SubsystemDims({2}), std::move(v));
}

RealMatrix projector_matrix(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  RealMatrix p(2, 2);
  p << c * c, c * s, c * s, s * s;
  return p;
}

LocalOperator projector_angle(double a) {
  return LocalOperator{{0}, projector_matrix(a).cast<Complex>(), OperatorKind::Projector};
}

namespace {
void require_same_layout(const PhysState& x, const PhysState& y) {
  if (!(x.layout == y.layout)) throw DimensionError("states have different layouts");
}
}  // namespace

Complex inner(const PhysState& x, const PhysState& y) {
  require_same_layout(x, y);
  return x.amplitudes.dot(y.amplitudes);  // conjugate-linear in the first argument
}

double norm(const PhysState& x) { return x.amplitudes.norm(); }

double dist(const PhysState& x, const PhysState& y) {
  require_same_layout(x, y);
  return (x.amplitudes - y.amplitudes).norm();
}

SubspaceBasis make_basis(const SubsystemDims& layout, std::vector<Vector> generators) {
  for (const Vector& g : generators) {
    if (static_cast<std::size_t>(g.size()) != layout.total_dim()) {
      throw DimensionError("generator length does not match the layout");
    }
  }
  SubspaceBasis s;
  s.layout = layout;
  s.rank = generators.size();
  s.vectors = std::move(generators);
  return s;
}

SubspaceBasis orthonormalize(const SubspaceBasis& basis, const Tolerances& tol) {
  SubspaceBasis out;
  out.layout = basis.layout;
  out.orthonormal = true;
  out.dropped = basis.dropped;
  for (const Vector& g : basis.vectors) {
    Vector r = g;
    // two passes of modified Gram-Schmidt keep the basis orthogonal to ~1e-15
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : out.vectors) r -= q.dot(r) * q;
    }
    const double n = r.norm();
    if (n < tol.rank) {
      ++out.dropped;
      continue;
    }
    out.vectors.push_back(r / n);
  }
  out.rank = out.vectors.size();
  return out;
}

PhysState project_onto(const SubspaceBasis& s, const PhysState& x) {
  const SubspaceBasis on = s.orthonormal ? s : orthonormalize(s);
  if (!(x.layout == on.layout)) throw DimensionError("state layout does not match subspace");
  Vector out = Vector::Zero(x.amplitudes.size());
  for (const Vector& q : on.vectors) out += q.dot(x.amplitudes) * q;
  return PhysState(x.layout, std::move(out));
}

std::vector<double> singular_profile(const SubspaceBasis& basis) {
  if (basis.vectors.empty()) return {};
  const auto rows = basis.vectors.front().size();
  const auto cols = static_cast<Eigen::Index>(basis.vectors.size());
  Matrix g(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k) g.col(k) = basis.vectors[static_cast<std::size_t>(k)];
  // eigenvalues of the smaller Gram matrix are the squared singular values
  const Matrix gram = (rows <= cols) ? Matrix(g * g.adjoint()) : Matrix(g.adjoint() * g);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  std::vector<double> sv;
  for (Eigen::Index i = es.eigenvalues().size(); i-- > 0;) {
    sv.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  }
  return sv;
}

double op_norm_on(const SubspaceBasis& s, const StateMap& m, const StateMap& n,
                  const Tolerances& tol) {
  const SubspaceBasis on = s.orthonormal ? s : orthonormalize(s, tol);
  if (on.vectors.empty()) return 0.0;
  std::vector<Vector> cols;
  cols.reserve(on.vectors.size());
  for (const Vector& q : on.vectors) {
    const PhysState x(on.layout, q);
    const PhysState mx = m(x);
    const PhysState nx = n(x);
    if (mx.amplitudes.size() != nx.amplitudes.size()) {
      throw DimensionError("compared maps have different codomains");
    }
    cols.push_back(mx.amplitudes - nx.amplitudes);
  }
  Matrix diff(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) diff.col(static_cast<Eigen::Index>(k)) = cols[k];
  // the largest singular value equals sqrt of the top eigenvalue of D^H D (r x r, r small)
  const Matrix gram = diff.adjoint() * diff;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace {

std::vector<std::size_t> keep_then_rest(std::span<const std::size_t> keep, std::size_t n) {
  std::vector<bool> kept(n, false);
  std::vector<std::size_t> order;
  for (std::size_t k : keep) {
    if (k >= n || kept[k]) throw DimensionError("invalid subsystem list");
    kept[k] = true;
    order.push_back(k);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!kept[i]) order.push_back(i);
  }
  return order;
}

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

Matrix partial_trace(const PhysState& x, std::span<const std::size_t> keep) {
  const std::vector<std::size_t> order = keep_then_rest(keep, x.layout.size());
  const PhysState p = permute(x, order);
  const auto dk = static_cast<Eigen::Index>(x.layout.dim_of(keep));
  const auto dr = static_cast<Eigen::Index>(x.layout.total_dim()) / dk;
  RowMajorMap m(p.amplitudes.data(), dk, dr);
  return m * m.adjoint();
}

Matrix partial_trace(const Matrix& rho, const SubsystemDims& layout,
                     std::span<const std::size_t> keep) {
  const auto total = static_cast<Eigen::Index>(layout.total_dim());
  if (rho.rows() != total || rho.cols() != total) throw DimensionError("density matrix size mismatch");
  const std::vector<std::size_t> order = keep_then_rest(keep, layout.size());
  // index map old -> permuted, obtained by permuting the basis labels
  Vector labels(total);
  for (Eigen::Index i = 0; i < total; ++i) labels(i) = static_cast<double>(i);
  const PhysState relabelled = permute(PhysState(layout, labels), order);
  std::vector<Eigen::Index> old_of_new(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i) {
    old_of_new[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(std::lround(relabelled.amplitudes(i).real()));
  }
  const auto dk = static_cast<Eigen::Index>(layout.dim_of(keep));
  const Eigen::Index dr = total / dk;
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index r = 0; r < dr; ++r) {
        acc += rho(old_of_new[static_cast<std::size_t>(i * dr + r)],
                   old_of_new[static_cast<std::size_t>(j * dr + r)]);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::VectorXd schmidt_coefficients(const PhysState& x, std::span<const std::size_t> group) {
  const std::vector<std::size_t> order = keep_then_rest(group, x.layout.size());
  const PhysState p = permute(x, order);
  const auto dk = static_cast<Eigen::Index>(x.layout.dim_of(group));
  const auto dr = static_cast<Eigen::Index>(x.layout.total_dim()) / dk;
  RowMajorMap m(p.amplitudes.data(), dk, dr);
  const Matrix reshaped = m;
  Eigen::JacobiSVD<Matrix> svd(reshaped);
  return svd.singularValues();
}

}  // namespace selftest
