#pragma once

// Dense operator substrate: composite Hilbert spaces, operators on them,
// density matrices and the handful of linear-algebra primitives the physics
// modules need (embedding, ladder operators, traces, fidelities).
//
// Kronecker ordering: slot 0 is the slowest-varying index of the composite
// basis. Qubit basis is (|e>, |g>): index 0 is the excited state, so
// sigma_z = diag(+1, -1) and sigma_- |e> = |g>.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "critpol/errors.hpp"

namespace critpol {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

class HilbertSpace {
 public:
  HilbertSpace() : HilbertSpace(std::vector<std::size_t>{1}) {}

  explicit HilbertSpace(std::vector<std::size_t> dims, std::vector<std::string> labels = {})
      : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw DimensionError("HilbertSpace: dims must be nonempty");
    for (auto d : dims_)
      if (d < 1) throw DimensionError("HilbertSpace: every subsystem dimension must be >= 1");
    if (labels_.empty()) {
      for (std::size_t i = 0; i < dims_.size(); ++i) labels_.push_back("s" + std::to_string(i));
    }
    if (labels_.size() != dims_.size())
      throw DimensionError("HilbertSpace: labels and dims differ in length");
    total_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t slots() const noexcept { return dims_.size(); }
  std::size_t total() const noexcept { return total_; }
  std::size_t dim(std::size_t slot) const { return dims_.at(slot); }

  /// Product of the dimensions of slots strictly after `slot`.
  std::size_t stride(std::size_t slot) const {
    std::size_t s = 1;
    for (std::size_t i = slot + 1; i < dims_.size(); ++i) s *= dims_[i];
    return s;
  }

  /// Sub-space made of the given slots, in ascending slot order.
  HilbertSpace subspace(const std::set<std::size_t>& keep) const {
    std::vector<std::size_t> d;
    std::vector<std::string> l;
    for (auto s : keep) {
      d.push_back(dims_.at(s));
      l.push_back(labels_.at(s));
    }
    return HilbertSpace(std::move(d), std::move(l));
  }

  // Labels are descriptive only; two spaces are compatible when dims agree.
  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
  std::size_t total_ = 1;
};

class Operator {
 public:
  Operator() = default;
  Operator(HilbertSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(space_.total());
    if (matrix_.rows() != n || matrix_.cols() != n)
      throw DimensionError("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                           std::to_string(matrix_.cols()) + ", space dimension is " +
                           std::to_string(n));
  }

  /// Single-subsystem operator; the space is inferred from the matrix size.
  explicit Operator(Matrix matrix) : space_({static_cast<std::size_t>(matrix.rows())}), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("Operator: matrix must be square");
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return space_.total(); }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }

  bool is_hermitian(double tol = 1e-12) const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  Operator& operator+=(const Operator& o) {
    require_same(o, "+=");
    matrix_ += o.matrix_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    require_same(o, "-=");
    matrix_ -= o.matrix_;
    return *this;
  }
  Operator& operator*=(cplx s) {
    matrix_ *= s;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.require_same(b, "*");
    return {a.space_, a.matrix_ * b.matrix_};
  }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(double s, Operator a) { return a *= cplx(s); }

  void require_same(const Operator& o, const char* what) const {
    if (!(space_ == o.space_)) throw DimensionError(std::string("Operator ") + what + ": space mismatch");
  }

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Operator identity(const HilbertSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.total());
  return {space, Matrix::Identity(n, n)};
}

/// Lifts a single-subsystem operator into `space` at `slot` (identity elsewhere).
inline Operator embed(const Matrix& op, std::size_t slot, const HilbertSpace& space) {
  if (slot >= space.slots()) throw DimensionError("embed: slot out of range");
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != space.dim(slot))
    throw DimensionError("embed: operator dimension " + std::to_string(op.rows()) +
                         " does not match dims[" + std::to_string(slot) + "] = " +
                         std::to_string(space.dim(slot)));
  std::size_t before = 1;
  for (std::size_t i = 0; i < slot; ++i) before *= space.dim(i);
  const auto after = static_cast<Eigen::Index>(space.stride(slot));
  Matrix m = kron(Matrix::Identity(static_cast<Eigen::Index>(before), static_cast<Eigen::Index>(before)),
                  kron(op, Matrix::Identity(after, after)));
  return {space, std::move(m)};
}

inline Operator embed(const Operator& op, std::size_t slot, const HilbertSpace& space) {
  return embed(op.matrix(), slot, space);
}

/// Truncated bosonic annihilation operator, <n-1|a|n> = sqrt(n).
inline Operator annihilation(std::size_t n_max) {
  if (n_max < 2) throw InvalidArgument("annihilation: truncation must be >= 2");
  const auto n = static_cast<Eigen::Index>(n_max);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return Operator(std::move(a));
}

inline Operator creation(std::size_t n_max) { return annihilation(n_max).adjoint(); }

inline Operator number(std::size_t n_max) {
  auto a = annihilation(n_max);
  return a.adjoint() * a;
}

inline Operator sigma_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return Operator(std::move(m));
}

/// sigma_- |e> = |g>.
inline Operator sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return Operator(std::move(m));
}

inline Operator sigma_plus() { return sigma_minus().adjoint(); }

/// Computational basis vector; `indices[k]` selects the level of slot k.
inline Vector basis_state(const HilbertSpace& space, const std::vector<std::size_t>& indices) {
  if (indices.size() != space.slots()) throw DimensionError("basis_state: one index per slot required");
  std::size_t flat = 0;
  for (std::size_t s = 0; s < space.slots(); ++s) {
    if (indices[s] >= space.dim(s)) throw DimensionError("basis_state: level index out of range");
    flat = flat * space.dim(s) + indices[s];
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.total()));
  v(static_cast<Eigen::Index>(flat)) = 1.0;
  return v;
}

inline double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  /// Validates the invariants: Hermitian, unit trace, positive semidefinite.
  static DensityMatrix from(Operator op) {
    const Matrix& m = op.matrix();
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol)
      throw InvalidState("DensityMatrix: not Hermitian (max |rho - rho^dag| = " + std::to_string(herm) + ")");
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > kTraceTol)
      throw InvalidState("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
    const double lmin = min_eigenvalue(0.5 * (m + m.adjoint()));
    if (lmin < -kPositivityTol * tr.real())
      throw InvalidState("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
    return DensityMatrix(std::move(op));
  }

  static DensityMatrix from(HilbertSpace space, Matrix m) { return from(Operator(std::move(space), std::move(m))); }

  static DensityMatrix pure(const HilbertSpace& space, const Vector& psi) {
    if (static_cast<std::size_t>(psi.size()) != space.total())
      throw DimensionError("DensityMatrix::pure: state dimension mismatch");
    const double norm = psi.norm();
    if (norm == 0.0) throw InvalidState("DensityMatrix::pure: zero vector");
    const Vector v = psi / norm;
    return DensityMatrix(Operator(space, v * v.adjoint()));
  }

  /// Tensor product of two valid states (valid by construction).
  static DensityMatrix product(const DensityMatrix& a, const DensityMatrix& b) {
    std::vector<std::size_t> dims = a.space().dims();
    std::vector<std::string> labels = a.space().labels();
    dims.insert(dims.end(), b.space().dims().begin(), b.space().dims().end());
    labels.insert(labels.end(), b.space().labels().begin(), b.space().labels().end());
    return DensityMatrix(Operator(HilbertSpace(std::move(dims), std::move(labels)), kron(a.matrix(), b.matrix())));
  }

  const Operator& op() const noexcept { return op_; }
  const HilbertSpace& space() const noexcept { return op_.space(); }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  std::size_t dim() const noexcept { return op_.dim(); }

  double purity() const { return (matrix() * matrix()).trace().real(); }

 private:
  explicit DensityMatrix(Operator op) : op_(std::move(op)) {}
  Operator op_;
};

/// Tr(rho A).
inline cplx expectation(const DensityMatrix& rho, const Operator& a) {
  if (!(rho.space() == a.space())) throw DimensionError("expectation: space mismatch");
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (rho.matrix().transpose().cwiseProduct(a.matrix())).sum();
}

/// Truncated thermal state with Bose occupation `nbar`, renormalized on the
/// retained levels.
inline DensityMatrix thermal_state(std::size_t n_max, double nbar) {
  if (n_max < 1) throw InvalidArgument("thermal_state: truncation must be >= 1");
  if (nbar < 0.0) throw InvalidArgument("thermal_state: occupation must be >= 0");
  const auto n = static_cast<Eigen::Index>(n_max);
  Matrix m = Matrix::Zero(n, n);
  const double ratio = nbar / (1.0 + nbar);
  double w = 1.0, z = 0.0;
  for (Eigen::Index k = 0; k < n; ++k, w *= ratio) {
    m(k, k) = w;
    z += w;
  }
  m /= z;
  return DensityMatrix::from(HilbertSpace({n_max}), std::move(m));
}

/// Population of the highest retained Fock level of a truncated thermal state.
inline double thermal_edge_occupancy(std::size_t n_max, double nbar) {
  const double ratio = nbar / (1.0 + nbar);
  return (1.0 - ratio) * std::pow(ratio, static_cast<double>(n_max - 1)) /
         (1.0 - std::pow(ratio, static_cast<double>(n_max)));
}

namespace detail {

// Flat offsets of every basis state restricted to `slots`, in Kronecker order
// (first listed slot slowest).
inline std::vector<std::size_t> slot_offsets(const HilbertSpace& space, const std::vector<std::size_t>& slots) {
  std::vector<std::size_t> offsets{0};
  for (auto s : slots) {
    const std::size_t stride = space.stride(s);
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * space.dim(s));
    for (auto o : offsets)
      for (std::size_t k = 0; k < space.dim(s); ++k) next.push_back(o + k * stride);
    offsets = std::move(next);
  }
  return offsets;
}

}  // namespace detail

/// Partial trace over raw matrices; keeps the slots in `keep`.
inline Matrix partial_trace(const Matrix& rho, const HilbertSpace& space, const std::set<std::size_t>& keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set must be nonempty");
  for (auto s : keep)
    if (s >= space.slots()) throw DimensionError("partial_trace: slot out of range");
  std::vector<std::size_t> kept(keep.begin(), keep.end()), traced;
  for (std::size_t s = 0; s < space.slots(); ++s)
    if (!keep.count(s)) traced.push_back(s);
  const auto k_off = detail::slot_offsets(space, kept);
  const auto t_off = detail::slot_offsets(space, traced);
  const auto nk = static_cast<Eigen::Index>(k_off.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Eigen::Index j = 0; j < nk; ++j)
    for (auto t : t_off) {
      const auto col = static_cast<Eigen::Index>(k_off[static_cast<std::size_t>(j)] + t);
      for (Eigen::Index i = 0; i < nk; ++i)
        out(i, j) += rho(static_cast<Eigen::Index>(k_off[static_cast<std::size_t>(i)] + t), col);
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::size_t>& keep) {
  Matrix m = partial_trace(rho.matrix(), rho.space(), keep);
  return DensityMatrix::from(rho.space().subspace(keep), std::move(m));
}

/// <psi|rho|psi> clamped to [0, 1] with 1e-12 slack.
inline double fidelity_pure(const Vector& psi, const Matrix& rho) {
  if (psi.size() != rho.rows()) throw DimensionError("fidelity_pure: dimension mismatch");
  const double f = psi.dot(rho * psi).real();
  if (f < -1e-12 || f > 1.0 + 1e-12)
    throw InvalidState("fidelity_pure: value " + std::to_string(f) + " outside [0,1]");
  return std::clamp(f, 0.0, 1.0);
}

inline double fidelity_pure(const Vector& psi, const DensityMatrix& rho) { return fidelity_pure(psi, rho.matrix()); }

/// Half the trace norm of rho - sigma.
inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw DimensionError("trace_distance: dimension mismatch");
  const Matrix d = rho - sigma;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// exp(-i H t) for Hermitian H.
inline Matrix unitary_propagator(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXcd phases = (-kI * t * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace critpol
