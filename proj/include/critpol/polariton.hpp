#pragma once

// Normal modes (polaritons) of the linearized electromechanical Hamiltonian
//
//   H = Delta_a da^dag da + omega_m db^dag db - G (da + da^dag)(db + db^dag)
//
// and the couplings of a spin, attached to the cavity quadrature through
// lambda (da^dag sigma_- + da sigma_+), to the two polariton branches.
//
// In quadratures x = (c + c^dag)/sqrt2, p = -i (c - c^dag)/sqrt2 the form is
// H = x^T Kx x / 2 + p^T Kp p / 2 with Kx = [[Delta_a, -2G], [-2G, omega_m]]
// and Kp = diag(Delta_a, omega_m). The canonical map x = A y, p = A^-T q with
// A = Kp^{1/2} O Omega^{-1/2} (O the eigenvectors of Kp^{1/2} Kx Kp^{1/2})
// diagonalizes it; that numeric route is the reference the closed forms are
// checked against.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "critpol/core/hilbert.hpp"
#include "critpol/errors.hpp"

namespace critpol {

/// G_c = sqrt(Delta_a omega_m) / 2.
inline double critical_coupling(double delta_a, double omega_m) {
  if (!(delta_a > 0.0) || !(omega_m > 0.0))
    throw InvalidArgument("critical_coupling: Delta_a and omega_m must be > 0");
  return 0.5 * std::sqrt(delta_a * omega_m);
}

struct PolaritonFrequencies {
  double plus = 0.0;
  double minus = 0.0;
};

struct SpinCouplings {
  double lambda_plus = 0.0;   ///< co-rotating, low branch
  double lambda_minus = 0.0;  ///< counter-rotating, low branch
  double eta_plus = 0.0;      ///< co-rotating, high branch
  double eta_minus = 0.0;     ///< counter-rotating, high branch
};

namespace detail {

// Linearized quadratic form, carrying Delta_a omega_m - 4 G^2 separately so
// near-critical instances specified through omega_- keep full precision.
struct QuadraticForm {
  double delta_a;
  double omega_m;
  double G;
  double gap;  // Delta_a omega_m - 4 G^2 >= 0 in the stable regime
};

inline void require_positive_modes(double delta_a, double omega_m, double G) {
  if (!(delta_a > 0.0) || !(omega_m > 0.0))
    throw InvalidArgument("polariton: Delta_a and omega_m must be > 0");
  if (!(G >= 0.0)) throw InvalidArgument("polariton: G must be >= 0");
}

inline double omega_plus_sq(const QuadraticForm& q) {
  const double d2 = q.delta_a * q.delta_a, m2 = q.omega_m * q.omega_m;
  return 0.5 * (d2 + m2 + std::sqrt((d2 - m2) * (d2 - m2) + 16.0 * q.G * q.G * q.delta_a * q.omega_m));
}

inline QuadraticForm stable_form(double delta_a, double omega_m, double G) {
  require_positive_modes(delta_a, omega_m, G);
  const double dm = delta_a * omega_m;
  double gap = dm - 4.0 * G * G;
  // A coupling equal to G_c up to rounding is the critical point itself.
  if (std::abs(gap) <= 8.0 * std::numeric_limits<double>::epsilon() * dm) gap = 0.0;
  if (gap < 0.0) {
    QuadraticForm q{delta_a, omega_m, G, gap};
    const double wm2 = dm * gap / omega_plus_sq(q);
    throw UnstableRegime("unstable regime: G = " + std::to_string(G) + " exceeds G_c = " +
                             std::to_string(0.5 * std::sqrt(dm)) + " (|omega_-^2| = " +
                             std::to_string(std::abs(wm2)) + ")",
                         std::abs(wm2));
  }
  return {delta_a, omega_m, G, gap};
}

inline QuadraticForm form_from_low_frequency(double delta_a, double omega_m, double omega_minus) {
  require_positive_modes(delta_a, omega_m, 0.0);
  if (!(omega_minus >= 0.0)) throw InvalidArgument("polariton: omega_- must be >= 0");
  const double wp2 = delta_a * delta_a + omega_m * omega_m - omega_minus * omega_minus;
  const double gap = omega_minus * omega_minus * wp2 / (delta_a * omega_m);
  if (gap > delta_a * omega_m || omega_minus > std::min(delta_a, omega_m) * (1.0 + 1e-15))
    throw InvalidArgument("polariton: omega_- = " + std::to_string(omega_minus) +
                          " exceeds min(Delta_a, omega_m), the G = 0 value");
  const double G = 0.5 * std::sqrt(std::max(0.0, delta_a * omega_m - gap));
  return {delta_a, omega_m, G, gap};
}

inline PolaritonFrequencies frequencies(const QuadraticForm& q) {
  const double wp2 = omega_plus_sq(q);
  // Product of the roots: omega_+^2 omega_-^2 = Delta_a omega_m (Delta_a omega_m - 4 G^2).
  const double wm2 = q.delta_a * q.omega_m * q.gap / wp2;
  return {std::sqrt(wp2), std::sqrt(std::max(0.0, wm2))};
}

inline double angle(const QuadraticForm& q) {
  return 0.5 * std::atan2(4.0 * q.G * std::sqrt(q.delta_a * q.omega_m),
                          q.delta_a * q.delta_a - q.omega_m * q.omega_m);
}

inline SpinCouplings closed_form_couplings(double lambda, const QuadraticForm& q) {
  const auto w = frequencies(q);
  if (!(w.minus > 0.0))
    throw SingularCoupling("spin-polariton couplings diverge at omega_- = 0 (critical point)");
  const double th = angle(q);
  const double d = q.delta_a;
  const double lo = 2.0 * std::sqrt(d * w.minus), hi = 2.0 * std::sqrt(d * w.plus);
  return {lambda * std::cos(th) * (d + w.minus) / lo, lambda * std::cos(th) * (d - w.minus) / lo,
          lambda * std::sin(th) * (d + w.plus) / hi, lambda * std::sin(th) * (d - w.plus) / hi};
}

}  // namespace detail

/// Closed-form polariton frequencies. Throws UnstableRegime for G > G_c.
inline PolaritonFrequencies polariton_frequencies(double delta_a, double omega_m, double G) {
  return detail::frequencies(detail::stable_form(delta_a, omega_m, G));
}

/// Mixing angle with tan(2 theta) = 4 G sqrt(Delta_a omega_m) / (Delta_a^2 - omega_m^2),
/// 2 theta in [0, pi] so cos(theta), sin(theta) >= 0.
inline double mixing_angle(double delta_a, double omega_m, double G) {
  return detail::angle(detail::stable_form(delta_a, omega_m, G));
}

/// Closed-form spin-polariton couplings in the customary near-critical form: lambda_pm = lambda cos(theta) (Delta_a +- omega_-) / (2 sqrt(Delta_a omega_-)),
/// eta_pm = lambda sin(theta) (Delta_a +- omega_+) / (2 sqrt(Delta_a omega_+)).
///
/// These assign cos(theta) to the low branch. The exact Bogoliubov transform
/// (extract_spin_couplings) gives the same expressions with cos and sin
/// exchanged; both coincide at Delta_a = omega_m.
inline SpinCouplings spin_polariton_couplings(double lambda, double delta_a, double omega_m, double G) {
  return detail::closed_form_couplings(lambda, detail::stable_form(delta_a, omega_m, G));
}

/// Linearized coupling that puts the low polariton at `omega_minus`.
inline double coupling_for_low_frequency(double delta_a, double omega_m, double omega_minus) {
  return detail::form_from_low_frequency(delta_a, omega_m, omega_minus).G;
}

struct PolaritonBasis {
  double delta_a = 0.0;
  double omega_m = 0.0;
  double G = 0.0;
  double G_c = 0.0;
  double gap = 0.0;  ///< Delta_a omega_m - 4 G^2
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double theta = 0.0;
  double lambda = 0.0;      ///< spin-cavity coupling the couplings below refer to
  SpinCouplings couplings;  ///< closed-form values for `lambda`
  /// Rows (a_-, a_-^dag, a_+, a_+^dag), columns (da, da^dag, db, db^dag).
  Eigen::Matrix4d bogo = Eigen::Matrix4d::Identity();

  /// Coefficients u, v of a_k = u_a da + v_a da^dag + u_b db + v_b db^dag.
  double u(int mode, int field) const { return bogo(2 * mode, 2 * field); }
  double v(int mode, int field) const { return bogo(2 * mode, 2 * field + 1); }
};

inline constexpr int kLow = 0;
inline constexpr int kHigh = 1;
inline constexpr int kCavity = 0;
inline constexpr int kMechanics = 1;

/// Commutator form J for the ordering (c, c^dag, d, d^dag).
inline Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  j(2, 3) = 1.0;
  j(3, 2) = -1.0;
  return j;
}

namespace detail {

inline PolaritonBasis diagonalize(const QuadraticForm& q, double lambda) {
  const auto w = frequencies(q);
  if (!(w.minus > 0.0))
    throw SingularCoupling("bogoliubov_diagonalize: omega_- = 0 at the critical point; no normal mode");

  const Eigen::Vector2d s(std::sqrt(q.delta_a), std::sqrt(q.omega_m));
  Eigen::Matrix2d kx;
  kx << q.delta_a, -2.0 * q.G, -2.0 * q.G, q.omega_m;
  const Eigen::Matrix2d m = s.asDiagonal() * kx * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  Eigen::Matrix2d o = es.eigenvectors();  // columns: low, high
  // Small eigenvalue from det / large eigenvalue; Eigen's value loses digits near G_c.
  const double wp2 = es.eigenvalues()(1);
  const double wm2 = q.delta_a * q.omega_m * q.gap / wp2;
  const Eigen::Vector2d omega(std::sqrt(wm2), std::sqrt(wp2));

  const Eigen::Matrix2d p = omega.cwiseSqrt().asDiagonal() * o.transpose() * s.cwiseInverse().asDiagonal();
  const Eigen::Matrix2d qm = omega.cwiseSqrt().cwiseInverse().asDiagonal() * o.transpose() * s.asDiagonal();
  Eigen::Matrix2d u = 0.5 * (p + qm), v = 0.5 * (p - qm);
  for (int k = 0; k < 2; ++k) {
    Eigen::Index imax = 0;
    u.row(k).cwiseAbs().maxCoeff(&imax);
    if (u(k, imax) < 0.0) {
      u.row(k) *= -1.0;
      v.row(k) *= -1.0;
    }
  }

  PolaritonBasis b;
  b.delta_a = q.delta_a;
  b.omega_m = q.omega_m;
  b.G = q.G;
  b.G_c = 0.5 * std::sqrt(q.delta_a * q.omega_m);
  b.gap = q.gap;
  b.omega_minus = omega(0);
  b.omega_plus = omega(1);
  b.theta = angle(q);
  b.lambda = lambda;
  b.couplings = closed_form_couplings(lambda, q);
  b.bogo.setZero();
  for (int k = 0; k < 2; ++k)
    for (int f = 0; f < 2; ++f) {
      b.bogo(2 * k, 2 * f) = u(k, f);
      b.bogo(2 * k, 2 * f + 1) = v(k, f);
      b.bogo(2 * k + 1, 2 * f) = v(k, f);
      b.bogo(2 * k + 1, 2 * f + 1) = u(k, f);
    }
  return b;
}

}  // namespace detail

/// Symplectic diagonalization of the linearized electromechanical Hamiltonian.
/// `lambda` only sets the stored closed-form couplings.
inline PolaritonBasis bogoliubov_diagonalize(double delta_a, double omega_m, double G, double lambda = 1.0) {
  return detail::diagonalize(detail::stable_form(delta_a, omega_m, G), lambda);
}

/// Same, parameterized by the low-polariton frequency (full precision near G_c).
inline PolaritonBasis bogoliubov_from_low_frequency(double delta_a, double omega_m, double omega_minus,
                                                    double lambda = 1.0) {
  return detail::diagonalize(detail::form_from_low_frequency(delta_a, omega_m, omega_minus), lambda);
}

/// Enforces omega_- >= eps * omega_m.
inline void require_off_critical(const PolaritonBasis& b, double eps) {
  if (b.omega_minus < eps * b.omega_m)
    throw SingularCoupling("omega_- = " + std::to_string(b.omega_minus) + " is within eps = " +
                           std::to_string(eps) + " of the critical point");
}

/// Couplings read off the Bogoliubov transform of lambda (da^dag sigma_- + da sigma_+),
/// with each mode's phase chosen so the co-rotating coupling is >= 0.
inline SpinCouplings extract_spin_couplings(const PolaritonBasis& b, double lambda) {
  // da = sum_k (u_ka c_k - v_ka c_k^dag)
  auto pair = [&](int k) {
    double co = lambda * b.u(k, kCavity), counter = -lambda * b.v(k, kCavity);
    if (co < 0.0) {
      co = -co;
      counter = -counter;
    }
    return std::pair{co, counter};
  };
  const auto [lp, lm] = pair(kLow);
  const auto [ep, em] = pair(kHigh);
  return {lp, lm, ep, em};
}

/// Mean low-polariton number when the cavity and mechanics are in thermal
/// states with occupations n_a, n_b.
inline double polariton_occupation(const PolaritonBasis& b, double n_a, double n_b, int mode = kLow) {
  auto sq = [](double x) { return x * x; };
  return sq(b.u(mode, kCavity)) * n_a + sq(b.v(mode, kCavity)) * (n_a + 1.0) +
         sq(b.u(mode, kMechanics)) * n_b + sq(b.v(mode, kMechanics)) * (n_b + 1.0);
}

/// Exact low-polariton annihilator on Fock(n_a) (x) Fock(n_b).
inline Operator low_polariton_operator(const PolaritonBasis& b, std::size_t n_a, std::size_t n_b,
                                       int mode = kLow) {
  if (n_a < 2 || n_b < 2) throw InvalidArgument("low_polariton_operator: truncations must be >= 2");
  const HilbertSpace space({n_a, n_b}, {"cavity", "mechanics"});
  const auto a = embed(annihilation(n_a), 0, space);
  const auto bb = embed(annihilation(n_b), 1, space);
  return b.u(mode, kCavity) * a + b.v(mode, kCavity) * a.adjoint() + b.u(mode, kMechanics) * bb +
         b.v(mode, kMechanics) * bb.adjoint();
}

/// Customary near-critical form:
/// a_- = [cos(theta) sqrt(Delta_a/omega_-) (da - da^dag) - sin(theta) sqrt(omega_m/omega_-) (db - db^dag)] / 2.
inline Operator near_critical_low_polariton(const PolaritonBasis& b, std::size_t n_a, std::size_t n_b) {
  if (n_a < 2 || n_b < 2) throw InvalidArgument("near_critical_low_polariton: truncations must be >= 2");
  if (!(b.omega_minus > 0.0)) throw SingularCoupling("near_critical_low_polariton: omega_- = 0");
  const HilbertSpace space({n_a, n_b}, {"cavity", "mechanics"});
  const auto a = embed(annihilation(n_a), 0, space);
  const auto bb = embed(annihilation(n_b), 1, space);
  const double ca = 0.5 * std::cos(b.theta) * std::sqrt(b.delta_a / b.omega_minus);
  const double cb = -0.5 * std::sin(b.theta) * std::sqrt(b.omega_m / b.omega_minus);
  return ca * (a - a.adjoint()) + cb * (bb - bb.adjoint());
}

enum class CouplingSource { closed_form, exact };

/// Spin (x) low polariton (x) high polariton Hamiltonian with all four
/// spin-polariton terms, co- and counter-rotating.
inline Operator transformed_hamiltonian(const PolaritonBasis& b, double delta_nv, double lambda,
                                        std::size_t n_low, std::size_t n_high,
                                        CouplingSource source = CouplingSource::closed_form) {
  if (n_low < 2 || n_high < 2) throw InvalidArgument("transformed_hamiltonian: truncations must be >= 2");
  const SpinCouplings c = source == CouplingSource::exact
                              ? extract_spin_couplings(b, lambda)
                              : detail::closed_form_couplings(lambda, detail::QuadraticForm{b.delta_a, b.omega_m, b.G, b.gap});
  const HilbertSpace space({2, n_low, n_high}, {"spin", "low", "high"});
  const auto sz = embed(sigma_z(), 0, space);
  const auto sm = embed(sigma_minus(), 0, space);
  const auto sp = sm.adjoint();
  const auto am = embed(annihilation(n_low), 1, space);
  const auto ap = embed(annihilation(n_high), 2, space);
  const auto amd = am.adjoint(), apd = ap.adjoint();
  return 0.5 * delta_nv * sz + b.omega_plus * (apd * ap) + b.omega_minus * (amd * am) +
         c.lambda_plus * (amd * sm + am * sp) + c.lambda_minus * (amd * sp + am * sm) +
         c.eta_plus * (apd * sm + ap * sp) + c.eta_minus * (apd * sp + ap * sm);
}

}  // namespace critpol
