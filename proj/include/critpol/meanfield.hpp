#pragma once

// Classical driven steady state of the cavity electromechanical subsystem and
// the physical-constant helpers that feed it. All rates and frequencies are
// angular (rad/s); geometry and circuit quantities are SI.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "critpol/core/hilbert.hpp"
#include "critpol/errors.hpp"

namespace critpol {

/// CODATA 2018 values plus the NV-center constants.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;          // J s
  double k_B = 1.380649e-23;              // J / K
  double mu_0 = 1.25663706212e-6;         // N / A^2
  double mu_B = 9.2740100783e-24;         // J / T
  double g_e = 2.0;                       // Lande factor
  double D = 2.0 * std::numbers::pi * 2.87e9;  // zero-field splitting [rad/s]
};

struct SystemParams {
  double omega_a = 0.0;     ///< cavity frequency
  double omega_m = 1.0;     ///< mechanical frequency
  double omega_d = 0.0;     ///< drive frequency
  double g = 0.0;           ///< single-photon electromechanical coupling
  double kappa = 0.0;       ///< cavity decay
  double gamma_m = 0.0;     ///< mechanical decay
  double Omega_d = 0.0;     ///< cavity drive amplitude
  double Omega_NV = 0.0;    ///< spin drive amplitude
  double omega_NV = 0.0;    ///< spin transition frequency
  double lambda = 0.0;      ///< spin-cavity coupling
  double gamma_perp = 0.0;  ///< spin transversal rate
  double gamma_par = 0.0;   ///< spin longitudinal rate
  double L_a = 2e-9;        ///< cavity inductance [H]
  double d = 50e-6;         ///< spin-conductor distance [m]
  double T = 0.0;           ///< temperature [K]
  double Q = 0.0;           ///< cavity quality factor

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      if (!(v >= 0.0)) throw InvalidArgument(std::string("SystemParams: ") + name + " must be >= 0");
    };
    nonneg(omega_a, "omega_a");
    nonneg(omega_d, "omega_d");
    nonneg(g, "g");
    nonneg(kappa, "kappa");
    nonneg(gamma_m, "gamma_m");
    nonneg(Omega_d, "Omega_d");
    nonneg(Omega_NV, "Omega_NV");
    nonneg(omega_NV, "omega_NV");
    nonneg(lambda, "lambda");
    nonneg(gamma_perp, "gamma_perp");
    nonneg(gamma_par, "gamma_par");
    nonneg(T, "T");
    nonneg(Q, "Q");
    if (!(omega_m > 0.0)) throw InvalidArgument("SystemParams: omega_m must be > 0");
    if (!(d > 0.0)) throw InvalidArgument("SystemParams: d must be > 0");
    if (!(L_a > 0.0)) throw InvalidArgument("SystemParams: L_a must be > 0");
  }
};

struct MeanFields {
  cplx a_mean{0.0, 0.0};
  cplx b_mean{0.0, 0.0};
  double N = 0.0;        ///< |a_mean|^2
  double delta_a = 0.0;  ///< effective cavity detuning
  double G = 0.0;        ///< g sqrt(N)
  double residual = 0.0; ///< largest relative residual of the three steady-state relations
};

namespace detail {

// Relative residuals of a = -Omega/(Delta - i kappa), b = g N/(omega_m - i gamma_m),
// Delta = Delta0 - g (b + b*).
inline double steady_state_residual(const SystemParams& p, const MeanFields& mf) {
  auto rel = [](cplx lhs, cplx rhs, double floor) {
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), floor});
  };
  const double delta0 = p.omega_a - p.omega_d;
  const cplx a_rhs = -p.Omega_d / cplx(mf.delta_a, -p.kappa);
  const cplx b_rhs = p.g * std::norm(mf.a_mean) / cplx(p.omega_m, -p.gamma_m);
  const double d_rhs = delta0 - p.g * 2.0 * mf.b_mean.real();
  const double scale = std::max({std::abs(delta0), std::abs(mf.delta_a), p.kappa, p.omega_m});
  return std::max({rel(mf.a_mean, a_rhs, 1e-300), rel(mf.b_mean, b_rhs, 1e-300),
                   std::abs(mf.delta_a - d_rhs) / scale});
}

inline MeanFields fields_from_detuning(const SystemParams& p, double delta_a) {
  MeanFields mf;
  mf.delta_a = delta_a;
  mf.a_mean = -p.Omega_d / cplx(delta_a, -p.kappa);
  mf.N = std::norm(mf.a_mean);
  mf.b_mean = p.g * mf.N / cplx(p.omega_m, -p.gamma_m);
  mf.G = p.g * std::sqrt(mf.N);
  return mf;
}

}  // namespace detail

/// Self-consistent steady state on the branch continuously connected to g = 0.
///
/// Eliminating <b> gives Delta_a = Delta0 - c N with c = 2 g^2 omega_m /
/// (omega_m^2 + gamma_m^2), so x = c N solves h(x) = x ((Delta0 - x)^2 +
/// kappa^2) = c |Omega_d|^2. Raising g only raises the right-hand side, which
/// makes the g = 0 branch the smallest root while it exists. Damped iteration
/// on Delta_a (relaxation 0.5) is tried first; the cubic is the fallback and
/// the branch arbiter. Throws NonConvergence past the fold of that branch.
inline MeanFields solve_mean_fields(const SystemParams& p, double tol = 1e-12) {
  if (!(tol > 0.0)) throw InvalidArgument("solve_mean_fields: tol must be > 0");
  p.validate();
  const double delta0 = p.omega_a - p.omega_d;
  const double omega2 = p.Omega_d * p.Omega_d;
  const double c = 2.0 * p.g * p.g * p.omega_m / (p.omega_m * p.omega_m + p.gamma_m * p.gamma_m);
  const double k2 = p.kappa * p.kappa;

  if (omega2 == 0.0 || c == 0.0) {
    MeanFields mf = detail::fields_from_detuning(p, delta0);
    mf.residual = detail::steady_state_residual(p, mf);
    return mf;
  }
  if (delta0 == 0.0 && p.kappa == 0.0)
    throw NonConvergence("solve_mean_fields: resonant drive without cavity loss has no steady state");

  auto h = [&](double x) { return x * ((delta0 - x) * (delta0 - x) + k2); };
  const double target = c * omega2;

  // Upper end of the g = 0 branch: the local maximum of h, if any.
  double x_hi = std::numeric_limits<double>::infinity();
  const double disc = delta0 * delta0 - 3.0 * k2;
  if (delta0 > 0.0 && disc > 0.0) {
    x_hi = (2.0 * delta0 - std::sqrt(disc)) / 3.0;
    if (target > h(x_hi))
      throw NonConvergence("solve_mean_fields: drive exceeds the fold of the g=0 branch (bistable regime); "
                           "no steady state continuously connected to g=0");
  }

  // Damped fixed-point iteration on Delta_a.
  double delta = delta0;
  bool converged = false;
  const double scale = std::max({std::abs(delta0), p.kappa, 1e-300});
  for (int it = 0; it < 5000; ++it) {
    const double n = omega2 / (delta * delta + k2);
    const double next = 0.5 * delta + 0.5 * (delta0 - c * n);
    const double step = std::abs(next - delta);
    delta = next;
    if (step <= 1e-15 * scale) {
      converged = true;
      break;
    }
  }
  double x = delta0 - delta;
  if (!converged || !(x >= 0.0) || x > x_hi) {
    // Fallback: bracket the smallest root of h(x) = target in [0, x_hi].
    double lo = 0.0, hi = std::isfinite(x_hi) ? x_hi : 1.0;
    if (!std::isfinite(x_hi))
      while (h(hi) < target) hi *= 2.0;
    for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < target ? lo : hi) = mid;
    }
    x = 0.5 * (lo + hi);
  }
  // Newton polish of f(x) = h(x) - target.
  for (int it = 0; it < 8; ++it) {
    const double f = h(x) - target;
    const double df = 3.0 * x * x - 4.0 * delta0 * x + delta0 * delta0 + k2;
    if (df <= 0.0) break;
    const double nx = x - f / df;
    if (!(nx >= 0.0) || nx > x_hi) break;
    if (std::abs(nx - x) <= 1e-17 * std::max(x, 1e-300)) {
      x = nx;
      break;
    }
    x = nx;
  }

  MeanFields mf = detail::fields_from_detuning(p, delta0 - x);
  mf.residual = detail::steady_state_residual(p, mf);
  if (!(mf.residual < tol))
    throw NonConvergence("solve_mean_fields: residual " + std::to_string(mf.residual) +
                         " above tolerance " + std::to_string(tol));
  return mf;
}

/// Spin-cavity coupling of a spin at distance d from the central conductor:
/// lambda = 2 g_e mu_B B_rms(d) / hbar with B_rms = mu_0 I_rms / (2 pi d) and
/// I_rms = sqrt(hbar omega_a / (2 L_a)).
inline double coupling_estimate(double d, double omega_a, double L_a, const PhysicalConstants& k = {}) {
  if (!(d > 0.0) || !(omega_a > 0.0) || !(L_a > 0.0))
    throw InvalidArgument("coupling_estimate: d, omega_a and L_a must be > 0");
  const double i_rms = std::sqrt(k.hbar * omega_a / (2.0 * L_a));
  const double b_rms = k.mu_0 * i_rms / (2.0 * std::numbers::pi * d);
  return 2.0 * k.g_e * k.mu_B * b_rms / k.hbar;
}

/// Bose occupation [exp(hbar omega / k_B T) - 1]^-1.
inline double thermal_occupation(double omega, double T, const PhysicalConstants& k = {}) {
  if (!(omega > 0.0)) throw InvalidArgument("thermal_occupation: omega must be > 0");
  if (!(T >= 0.0)) throw InvalidArgument("thermal_occupation: T must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(k.hbar * omega / (k.k_B * T));
}

/// Inverse of thermal_occupation in omega.
inline double frequency_for_occupation(double n_th, double T, const PhysicalConstants& k = {}) {
  if (!(n_th > 0.0) || !(T > 0.0)) throw InvalidArgument("frequency_for_occupation: n_th and T must be > 0");
  return std::log1p(1.0 / n_th) * k.k_B * T / k.hbar;
}

/// omega_NV = D - g_e mu_B B_ex / hbar.
inline double nv_transition_frequency(double b_ex, const PhysicalConstants& k = {}) {
  return k.D - k.g_e * k.mu_B * b_ex / k.hbar;
}

}  // namespace critpol
