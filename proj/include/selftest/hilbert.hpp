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

// Dense linear algebra over tensor products of small subsystems.
//
// States are amplitude vectors laid out row-major over the subsystem
// indices (subsystem 0 is the most significant digit). Local operators are
// applied by index arithmetic; the full-space matrix is never formed.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace selftest {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 20;

/// Numerical thresholds shared by every module.
struct Tolerances {
  double structural = 1e-10;  ///< unitarity, idempotence, frame completeness
  double golden = 1e-12;      ///< closed-form expected values
  double rank = 1e-9;         ///< Gram-Schmidt deflation threshold
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered list of subsystem dimensions with a cap on the total dimension.
class SubsystemDims {
 public:
  SubsystemDims() : total_(1) {}
  explicit SubsystemDims(std::vector<std::size_t> dims, std::size_t cap = kDefaultDimCap);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t total_dim() const { return total_; }
  std::size_t stride(std::size_t i) const { return strides_.at(i); }
  std::size_t cap() const { return cap_; }

  /// Product of the dimensions of `targets`.
  std::size_t dim_of(std::span<const std::size_t> targets) const;

  SubsystemDims concat(const SubsystemDims& other) const;
  /// Layout whose k-th subsystem is this layout's subsystem `order[k]`.
  SubsystemDims permuted(std::span<const std::size_t> order) const;

  bool operator==(const SubsystemDims& other) const { return dims_ == other.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
  std::size_t cap_ = kDefaultDimCap;
};

struct PhysState {
  SubsystemDims layout;
  Vector amplitudes;

  PhysState() = default;
  PhysState(SubsystemDims dims, Vector amps);

  static PhysState basis(const SubsystemDims& dims, std::size_t index);
  /// Computational basis state |digits...> (one digit per subsystem).
  static PhysState basis(const SubsystemDims& dims, std::span<const std::size_t> digits);

  double norm() const { return amplitudes.norm(); }
  PhysState normalized() const;
};

enum class OperatorKind { General, Unitary, Projector };

/// A matrix acting on an ordered list of subsystems. The matrix is indexed
/// row-major over `targets` in the listed order.
struct LocalOperator {
  std::vector<std::size_t> targets;
  Matrix matrix;
  OperatorKind kind = OperatorKind::General;
};

/// Throws DimensionError / InvariantError when `op` does not fit `layout` or
/// violates its declared kind.
void validate(const LocalOperator& op, const SubsystemDims& layout, const Tolerances& tol = {});

bool is_unitary(const Matrix& m, double tol);
bool is_projector(const Matrix& m, double tol);

/// Kronecker product of two dense matrices (or vectors) of any scalar type.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  return DenseMatrix<Scalar>(Eigen::kroneckerProduct(a.derived(), b.derived()));
}

Matrix kron(std::span<const Matrix> factors);

PhysState tensor(const PhysState& a, const PhysState& b);
PhysState tensor(std::span<const PhysState> states);
/// Kronecker product of operators; targets of `b` are shifted past `a`'s
/// highest target so the result acts on the concatenated layout.
LocalOperator tensor(const LocalOperator& a, const LocalOperator& b);

/// Reorders subsystems: subsystem k of the result is subsystem `order[k]` of `x`.
PhysState permute(const PhysState& x, std::span<const std::size_t> order);

/// Applies `m` to `targets` of the amplitude vector in place, by index
/// arithmetic over the untouched subsystems.
template <typename Derived>
void apply_local(const Eigen::MatrixBase<Derived>& m, std::span<const std::size_t> targets,
                 const SubsystemDims& layout, Vector& amps);

PhysState apply(const LocalOperator& op, const PhysState& x);

/// A local operator bound to a layout: acts on full-space states as
/// op ⊗ Id_rest without forming the full matrix.
class EmbeddedOperator {
 public:
  EmbeddedOperator(LocalOperator op, SubsystemDims layout, const Tolerances& tol = {});

  PhysState operator()(const PhysState& x) const;
  const LocalOperator& local() const { return op_; }
  const SubsystemDims& layout() const { return layout_; }

 private:
  LocalOperator op_;
  SubsystemDims layout_;
};

EmbeddedOperator embed(const LocalOperator& op, const SubsystemDims& layout,
                       const Tolerances& tol = {});

PhysState angle_state(double a);
/// |a><a| as a 2x2 matrix built from (cos a, sin a).
RealMatrix projector_matrix(double a);
LocalOperator projector_angle(double a);

Complex inner(const PhysState& x, const PhysState& y);
double norm(const PhysState& x);
double dist(const PhysState& x, const PhysState& y);

/// Spanning set of a subspace; after `orthonormalize` the vectors are
/// orthonormal and `rank` counts them.
struct SubspaceBasis {
  SubsystemDims layout;
  std::vector<Vector> vectors;
  bool orthonormal = false;
  std::size_t rank = 0;
  std::size_t dropped = 0;  ///< generators deflated below the rank threshold
};

SubspaceBasis make_basis(const SubsystemDims& layout, std::vector<Vector> generators);
SubspaceBasis orthonormalize(const SubspaceBasis& basis, const Tolerances& tol = {});
PhysState project_onto(const SubspaceBasis& s, const PhysState& x);

/// Singular values (descending) of the matrix whose columns are the basis
/// vectors as given (before orthonormalization).
std::vector<double> singular_profile(const SubspaceBasis& basis);

using StateMap = std::function<PhysState(const PhysState&)>;

/// ||M - N||_S: the largest singular value of (M - N) on an orthonormal basis
/// of S. `s` is orthonormalized first when needed.
double op_norm_on(const SubspaceBasis& s, const StateMap& m, const StateMap& n,
                  const Tolerances& tol = {});

/// Reduced density matrix on `keep` (in the listed order).
Matrix partial_trace(const PhysState& x, std::span<const std::size_t> keep);
Matrix partial_trace(const Matrix& rho, const SubsystemDims& layout,
                     std::span<const std::size_t> keep);

/// Singular values of the amplitudes reshaped across the cut `group | rest`.
Eigen::VectorXd schmidt_coefficients(const PhysState& x, std::span<const std::size_t> group);

// ---------------------------------------------------------------------------

namespace detail {
/// Offsets of every digit combination of `targets` (row-major over targets)
/// and the base indices of every combination of the remaining subsystems.
struct IndexPlan {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> bases;
};
IndexPlan plan_indices(std::span<const std::size_t> targets, const SubsystemDims& layout);
}  // namespace detail

template <typename Derived>
void apply_local(const Eigen::MatrixBase<Derived>& m, std::span<const std::size_t> targets,
                 const SubsystemDims& layout, Vector& amps) {
  const detail::IndexPlan plan = detail::plan_indices(targets, layout);
  const auto sub = static_cast<Eigen::Index>(plan.offsets.size());
  if (m.rows() != sub || m.cols() != sub) {
    throw DimensionError("local operator is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " but targets span dimension " +
                         std::to_string(sub));
  }
  const Matrix mc = m.template cast<Complex>();
  Vector gathered(sub);
  for (std::size_t base : plan.bases) {
    for (Eigen::Index s = 0; s < sub; ++s) gathered(s) = amps(base + plan.offsets[s]);
    const Vector out = mc * gathered;
    for (Eigen::Index s = 0; s < sub; ++s) amps(base + plan.offsets[s]) = out(s);
  }
}

}  // namespace selftest
