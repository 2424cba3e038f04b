#pragma once

// Lindblad master equation
//
//   drho/dt = -i [H, rho] + sum_k rate_k D[L_k] rho,
//   D[o] rho = o rho o^dag - (o^dag o rho + rho o^dag o) / 2,
//
// integrated with fixed-step RK4. Two generators share the integrator: a
// dense one over full-space operators, and LocalLiouvillian, which keeps each
// term on the few slots it acts on and applies it through the Kronecker
// structure (cost ~ D^2 per nonzero instead of D^3 per product).

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "critpol/core/hilbert.hpp"
#include "critpol/errors.hpp"

namespace critpol {

/// A jump operator with its rate and thermal occupation. n_th > 0 expands to
/// a downward channel rate (n_th + 1) D[L] and an upward channel rate n_th D[L^dag].
struct Dissipator {
  Operator jump;
  double rate = 0.0;
  double n_th = 0.0;

  void validate() const {
    if (!(rate >= 0.0)) throw InvalidArgument("Dissipator: rate must be >= 0");
    if (!(n_th >= 0.0)) throw InvalidArgument("Dissipator: n_th must be >= 0");
  }
};

/// A single Lindblad channel rate * D[L].
struct Channel {
  Matrix jump;
  double rate;
};

inline std::vector<Channel> expand(const std::vector<Dissipator>& dissipators) {
  std::vector<Channel> out;
  for (const auto& d : dissipators) {
    d.validate();
    if (d.rate == 0.0) continue;
    out.push_back({d.jump.matrix(), d.rate * (d.n_th + 1.0)});
    if (d.n_th > 0.0) out.push_back({d.jump.matrix().adjoint(), d.rate * d.n_th});
  }
  return out;
}

/// Dense generator over full-space matrices.
class DenseLiouvillian {
 public:
  DenseLiouvillian(const Operator& h, const std::vector<Dissipator>& dissipators)
      : space_(h.space()), h_(h.matrix()), channels_(expand(dissipators)) {
    for (const auto& d : dissipators)
      if (!(d.jump.space() == space_)) throw DimensionError("lindblad: dissipator space mismatch");
    for (const auto& c : channels_) {
      const Matrix ldl = c.jump.adjoint() * c.jump;
      decay_ += c.rate * ldl;
      rate_scale_ += c.rate * ldl.cwiseAbs().rowwise().sum().maxCoeff();
    }
    h_norm_ = h_.cwiseAbs().rowwise().sum().maxCoeff();
  }

  const HilbertSpace& space() const noexcept { return space_; }

  Matrix operator()(const Matrix& rho) const {
    Matrix out = -kI * (h_ * rho - rho * h_);
    if (!channels_.empty()) {
      out.noalias() -= 0.5 * (decay_ * rho + rho * decay_);
      for (const auto& c : channels_) out.noalias() += c.rate * (c.jump * rho * c.jump.adjoint());
    }
    return out;
  }

  /// Upper bound on the fastest coherent frequency (row-sum norm of H).
  double max_frequency() const noexcept { return h_norm_; }
  /// Upper bound on the fastest decay rate.
  double max_rate() const noexcept { return rate_scale_; }

 private:
  HilbertSpace space_;
  Matrix h_;
  std::vector<Channel> channels_;
  Matrix decay_ = Matrix::Zero(h_.rows(), h_.cols());
  double h_norm_ = 0.0;
  double rate_scale_ = 0.0;
};

/// Right-hand side of the master equation for a single density matrix.
inline Operator lindblad_rhs(const Operator& rho, const Operator& h, const std::vector<Dissipator>& dissipators) {
  if (!(rho.space() == h.space())) throw DimensionError("lindblad_rhs: space mismatch between rho and H");
  return {rho.space(), DenseLiouvillian(h, dissipators)(rho.matrix())};
}

inline Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, const std::vector<Dissipator>& dissipators) {
  return lindblad_rhs(rho.op(), h, dissipators);
}

/// Generator whose terms each act on a run of consecutive slots.
class LocalLiouvillian {
 public:
  explicit LocalLiouvillian(HilbertSpace space) : space_(std::move(space)) {}

  const HilbertSpace& space() const noexcept { return space_; }

  /// Adds H_local (x) identity, H_local spanning slots [first_slot, first_slot + k).
  void add_hamiltonian(std::size_t first_slot, const Matrix& h) {
    const auto key = span_of(first_slot, h);
    accumulate(key, -kI * h);
    dense_h_.emplace_back(key, h);
    h_norm_ += h.cwiseAbs().rowwise().sum().maxCoeff();
  }

  void add_dissipator(std::size_t first_slot, const Matrix& jump, double rate, double n_th = 0.0) {
    if (!(rate >= 0.0) || !(n_th >= 0.0)) throw InvalidArgument("add_dissipator: rate and n_th must be >= 0");
    if (rate == 0.0) return;
    add_channel(first_slot, jump, rate * (n_th + 1.0));
    if (n_th > 0.0) add_channel(first_slot, jump.adjoint(), rate * n_th);
  }

  // K rho + rho K^dag + sum rate L rho L^dag, with K = -i H - sum rate L^dag L / 2.
  // Every term is applied column by column, so rho is never transposed; the
  // diagonal part of K is applied in one pass over the full space.
  Matrix operator()(const Matrix& rho) const {
    Matrix out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
  }

  /// operator() into a preallocated `out`. Uses an internal scratch matrix,
  /// so one instance must not be applied from several threads at once.
  void apply(const Matrix& rho, Matrix& out) const {
    const auto n = rho.rows();
    out.resize(n, n);
    if (diag_.size() == n) {
      const Vector dc = diag_.conjugate();
      for (Eigen::Index j = 0; j < n; ++j) out.col(j) = (diag_.array() + dc(j)) * rho.col(j).array();
    } else {
      out.setZero();
    }
    for (const auto& [key, sparse] : left_terms_) {
      left_apply(rho, sparse, 1.0, out);
      right_apply(rho, sparse, true, out);
    }
    scratch_.resize(n, n);
    for (const auto& c : jumps_) {
      scratch_.setZero();
      right_apply(rho, c.op, true, scratch_);  // rho L^dag
      left_apply(scratch_, c.op, c.rate, out);  // L rho L^dag
    }
  }

  double max_frequency() const noexcept { return h_norm_; }
  double max_rate() const noexcept { return rate_scale_; }

  /// Dense full-space Hamiltonian and channel list (for cross-checks).
  Operator dense_hamiltonian() const {
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(space_.total()), static_cast<Eigen::Index>(space_.total()));
    for (const auto& [key, m] : dense_h_) h += lift(key, m);
    return {space_, h};
  }

  std::vector<Dissipator> dense_dissipators() const {
    std::vector<Dissipator> out;
    for (const auto& c : dense_jumps_) out.push_back({Operator(space_, lift(c.first, c.second.jump)), c.second.rate, 0.0});
    return out;
  }

 private:
  struct Span {
    std::size_t first;
    std::size_t count;
    std::size_t before;
    std::size_t dim;
    std::size_t after;
    bool operator<(const Span& o) const { return std::pair(first, count) < std::pair(o.first, o.count); }
  };

  struct Sparse {
    Span span;
    std::vector<std::tuple<Eigen::Index, Eigen::Index, cplx>> entries;  // (row, col, value)
  };

  struct SparseChannel {
    Sparse op;
    double rate;
  };

  Span span_of(std::size_t first, const Matrix& m) const {
    if (m.rows() != m.cols()) throw DimensionError("LocalLiouvillian: term must be square");
    std::size_t dim = 1, last = first;
    while (dim < static_cast<std::size_t>(m.rows()) && last < space_.slots()) dim *= space_.dim(last++);
    if (first >= space_.slots() || dim != static_cast<std::size_t>(m.rows()))
      throw DimensionError("LocalLiouvillian: term dimension does not match a run of slots starting at " +
                           std::to_string(first));
    std::size_t before = 1;
    for (std::size_t i = 0; i < first; ++i) before *= space_.dim(i);
    return {first, last - first, before, dim, space_.total() / (before * dim)};
  }

  static Sparse sparsify(const Span& span, const Matrix& m) {
    Sparse s{span, {}};
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j) != cplx(0.0)) s.entries.emplace_back(i, j, m(i, j));
    return s;
  }

  Matrix lift(const Span& s, const Matrix& m) const {
    const auto b = static_cast<Eigen::Index>(s.before), a = static_cast<Eigen::Index>(s.after);
    return kron(Matrix::Identity(b, b), kron(m, Matrix::Identity(a, a)));
  }

  void accumulate(const Span& key, const Matrix& k) {
    auto it = left_dense_.find(key);
    if (it == left_dense_.end()) it = left_dense_.emplace(key, Matrix::Zero(k.rows(), k.cols())).first;
    it->second += k;
    // Diagonal terms go to diag_, the rest stay sparse per span.
    left_terms_.clear();
    diag_ = Vector::Zero(static_cast<Eigen::Index>(space_.total()));
    for (const auto& [span, m] : left_dense_) {
      if (m.isDiagonal(0.0)) {
        const auto d = static_cast<Eigen::Index>(span.dim), after = static_cast<Eigen::Index>(span.after);
        for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(span.before); ++b)
          for (Eigen::Index i = 0; i < d; ++i) diag_.segment((b * d + i) * after, after).array() += m(i, i);
      } else {
        left_terms_.emplace(span, sparsify(span, m));
      }
    }
  }

  void add_channel(std::size_t first, const Matrix& jump, double rate) {
    const auto key = span_of(first, jump);
    const Matrix ldl = jump.adjoint() * jump;
    accumulate(key, -0.5 * rate * ldl);
    jumps_.push_back({sparsify(key, jump), rate});
    dense_jumps_.emplace_back(key, Channel{jump, rate});
    rate_scale_ += rate * ldl.cwiseAbs().rowwise().sum().maxCoeff();
  }

  // out += scale (I (x) op (x) I) x, one column at a time.
  static void left_apply(const Matrix& x, const Sparse& s, double scale, Matrix& out) {
    const auto d = static_cast<Eigen::Index>(s.span.dim), after = static_cast<Eigen::Index>(s.span.after);
    const auto before = static_cast<Eigen::Index>(s.span.before);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const cplx* xc = x.col(c).data();
      cplx* oc = out.col(c).data();
      for (Eigen::Index b = 0; b < before; ++b)
        for (const auto& [row, col, val] : s.entries) {
          const cplx v = scale * val;
          cplx* o = oc + (b * d + row) * after;
          const cplx* in = xc + (b * d + col) * after;
          for (Eigen::Index a = 0; a < after; ++a) o[a] += v * in[a];
        }
    }
  }

  // out += rho (I (x) op (x) I), or rho (I (x) op^dag (x) I) when `adjoint`.
  static void right_apply(const Matrix& rho, const Sparse& s, bool adjoint, Matrix& out) {
    const auto d = static_cast<Eigen::Index>(s.span.dim), after = static_cast<Eigen::Index>(s.span.after);
    for (const auto& [row, col, val] : s.entries) {
      // (rho A)(:, c_i) += rho(:, c_j) A(j, i)
      const Eigen::Index j = adjoint ? col : row;
      const Eigen::Index i = adjoint ? row : col;
      const cplx v = adjoint ? std::conj(val) : val;
      for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(s.span.before); ++b)
        for (Eigen::Index a = 0; a < after; ++a)
          out.col((b * d + i) * after + a).noalias() += v * rho.col((b * d + j) * after + a);
    }
  }

  HilbertSpace space_;
  std::map<Span, Matrix> left_dense_;
  std::map<Span, Sparse> left_terms_;
  Vector diag_;
  mutable Matrix scratch_;
  std::vector<SparseChannel> jumps_;
  std::vector<std::pair<Span, Matrix>> dense_h_;
  std::vector<std::pair<Span, Channel>> dense_jumps_;
  double h_norm_ = 0.0;
  double rate_scale_ = 0.0;
};

/// Named scalar sampled on the time grid: f(t, rho).
struct Observable {
  std::string name;
  std::function<double(double, const Matrix&)> eval;
};

/// Re Tr(rho A).
inline Observable expectation_observable(std::string name, const Operator& a) {
  return {std::move(name), [m = a.matrix()](double, const Matrix& rho) {
            return (rho.transpose().cwiseProduct(m)).sum().real();
          }};
}

struct Trajectory {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> observables;
  std::optional<DensityMatrix> final_state;
  double max_trace_drift = 0.0;

  const std::vector<double>& series(const std::string& name) const {
    for (const auto& [n, s] : observables)
      if (n == name) return s;
    throw InvalidArgument("Trajectory: no observable named '" + name + "'");
  }
};

/// Default step (50 x fastest coherent frequency)^-1, capped for RK4 stability
/// on the dissipative part.
inline double default_time_step(double max_frequency, double max_rate) {
  double dt = std::numeric_limits<double>::infinity();
  if (max_frequency > 0.0) dt = 1.0 / (50.0 * max_frequency);
  if (max_rate > 0.0) dt = std::min(dt, 1.0 / max_rate);
  if (!std::isfinite(dt)) dt = 1.0;
  return dt;
}

struct EvolveOptions {
  double abort_drift = 1e-6;  ///< |Tr rho - 1| that aborts the run
};

/// Fixed-step RK4. The step is shrunk to t_final / ceil(t_final / dt) so the
/// grid lands exactly on t_final; observables are sampled at every step.
template <class Generator>
Trajectory evolve(const DensityMatrix& rho0, const Generator& gen, double t_final, double dt,
                  const std::vector<Observable>& observables = {}, const EvolveOptions& opts = {}) {
  if (!(rho0.space() == gen.space())) throw DimensionError("evolve: initial state and generator spaces differ");
  if (!(dt > 0.0)) throw InvalidArgument("evolve: dt must be > 0");
  if (!(t_final >= 0.0)) throw InvalidArgument("evolve: t_final must be >= 0");
  const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil(t_final / dt - 1e-9)));
  const double h = steps ? t_final / static_cast<double>(steps) : 0.0;

  Trajectory traj;
  traj.times.reserve(steps + 1);
  for (const auto& o : observables) traj.observables.emplace_back(o.name, std::vector<double>{});
  auto sample = [&](double t, const Matrix& rho) {
    traj.times.push_back(t);
    for (std::size_t k = 0; k < observables.size(); ++k) traj.observables[k].second.push_back(observables[k].eval(t, rho));
  };

  Matrix rho = rho0.matrix();
  const auto n = rho.rows();
  Matrix k(n, n), acc(n, n), stage(n, n);
  auto eval = [&](const Matrix& x) {
    if constexpr (requires { gen.apply(x, k); }) gen.apply(x, k);
    else k = gen(x);
  };
  sample(0.0, rho);
  for (std::size_t s = 1; s <= steps; ++s) {
    eval(rho);
    acc = k;
    stage = rho + (0.5 * h) * k;
    eval(stage);
    acc += 2.0 * k;
    stage = rho + (0.5 * h) * k;
    eval(stage);
    acc += 2.0 * k;
    stage = rho + h * k;
    eval(stage);
    acc += k;
    rho += (h / 6.0) * acc;
    stage = 0.5 * (rho + rho.adjoint());
    rho.swap(stage);

    const double drift = std::abs(rho.trace() - 1.0);
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    const double peak = rho.cwiseAbs().maxCoeff();
    if (drift > opts.abort_drift || !(peak <= 1.0 + opts.abort_drift))
      throw IntegrationError("evolve: integration diverged at t = " + std::to_string(s * h) + " (trace drift " +
                             std::to_string(drift) + ", max |rho_ij| " + std::to_string(peak) + ") with step " +
                             std::to_string(h) + " s; reduce dt below " +
                             std::to_string(default_time_step(gen.max_frequency(), gen.max_rate())) + " s");
    sample(static_cast<double>(s) * h, rho);
  }
  traj.final_state = DensityMatrix::from(rho0.space(), std::move(rho));
  return traj;
}

inline Trajectory evolve(const DensityMatrix& rho0, const Operator& h, const std::vector<Dissipator>& dissipators,
                         double t_final, double dt, const std::vector<Observable>& observables = {},
                         const EvolveOptions& opts = {}) {
  if (!(rho0.space() == h.space())) throw DimensionError("evolve: space mismatch");
  return evolve(rho0, DenseLiouvillian(h, dissipators), t_final, dt, observables, opts);
}

}  // namespace critpol
