#pragma once

// Time-domain experiments: vacuum Rabi oscillation between one spin and the
// low polariton, and the dissipative iSWAP gate study.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "critpol/core/hilbert.hpp"
#include "critpol/dispersive.hpp"
#include "critpol/dynamics/jaynes_cummings.hpp"
#include "critpol/dynamics/lindblad.hpp"
#include "critpol/errors.hpp"
#include "critpol/polariton.hpp"

namespace critpol {

struct RabiParams {
  double lambda_plus = 2.0 * std::numbers::pi * 3.5e6;
  /// Frame frequency. Spin and polariton are resonant, so 0 gives the frame
  /// rotating at omega_-; populations are identical in every frame.
  double omega_minus = 0.0;
  double kappa = 1e6;
  double gamma_perp = 1e3;
  double gamma_par = 0.0;  ///< rate of the D[sigma_z] channel
  std::size_t n_max = 8;
  double t_final = 0.0;  ///< 0 -> five vacuum Rabi periods
  double dt = 0.0;       ///< 0 -> default_time_step

  void validate() const {
    if (!(lambda_plus >= 0.0) || !(omega_minus >= 0.0) || !(kappa >= 0.0) || !(gamma_perp >= 0.0) ||
        !(gamma_par >= 0.0) || !(t_final >= 0.0) || !(dt >= 0.0))
      throw InvalidArgument("RabiParams: rates, frequencies and times must be >= 0");
    if (n_max < 2) throw TruncationError("RabiParams: n_max must be >= 2");
  }
};

/// Vacuum Rabi period pi / lambda_+ of P_e.
inline double rabi_period(double lambda_plus) {
  if (!(lambda_plus > 0.0)) throw InvalidArgument("rabi_period: lambda_+ must be > 0");
  return std::numbers::pi / lambda_plus;
}

/// |e>|0> under kappa D[a_-] + gamma_perp D[sigma_-] + gamma_par D[sigma_z] with
/// Delta_NV = omega_-. Series: P_e, n_polariton.
inline Trajectory rabi_experiment(const RabiParams& p) {
  p.validate();
  const auto h = jc_hamiltonian(p.omega_minus, p.omega_minus, p.lambda_plus, p.n_max);
  const auto& space = h.space();
  const auto a = embed(annihilation(p.n_max), 1, space);
  const auto sm = embed(sigma_minus(), 0, space);
  std::vector<Dissipator> diss{{a, p.kappa, 0.0}, {sm, p.gamma_perp, 0.0}, {embed(sigma_z(), 0, space), p.gamma_par, 0.0}};

  const DenseLiouvillian gen(h, diss);
  const double t_final = p.t_final > 0.0 ? p.t_final : 5.0 * rabi_period(p.lambda_plus);
  const double dt = p.dt > 0.0 ? p.dt : default_time_step(gen.max_frequency(), gen.max_rate());
  const auto rho0 = DensityMatrix::pure(space, basis_state(space, {0, 0}));
  return evolve(rho0, gen, t_final, dt,
                {expectation_observable("P_e", sm.adjoint() * sm), expectation_observable("n_polariton", a.adjoint() * a)});
}

/// Times where `series - level` changes sign, linearly interpolated.
inline std::vector<double> level_crossings(const std::vector<double>& times, const std::vector<double>& series,
                                           double level) {
  std::vector<double> out;
  for (std::size_t i = 1; i < times.size() && i < series.size(); ++i) {
    const double f0 = series[i - 1] - level, f1 = series[i] - level;
    if ((f0 < 0.0) != (f1 < 0.0)) out.push_back(times[i - 1] + (times[i] - times[i - 1]) * f0 / (f0 - f1));
  }
  return out;
}

struct GateStudyParams {
  double lambda_plus1 = 2.0 * std::numbers::pi * 3.5e6;
  double lambda_plus2 = 2.0 * std::numbers::pi * 3.5e6;
  double delta1 = 2.0 * std::numbers::pi * 35e6;
  double delta2 = 2.0 * std::numbers::pi * 35e6;
  double omega_minus = 100.0;
  double kappa = 1e6;
  double n_th_a = 0.01;
  double gamma_m = 10.0;
  double n_th_m = 260.0;
  double gamma_perp = 0.0;  ///< applied to both spins
  double gamma_par = 0.0;   ///< D[sigma_z] on both spins
  bool composite = true;    ///< carry the cavity and mechanical Fock spaces
  std::size_t n_a = 20;
  std::size_t n_b = 20;
  double t_final = 0.0;  ///< 0 -> gate time pi / (2 g_eff)
  double dt = 0.0;       ///< 0 -> default_time_step
  /// When set, N_pl is the thermal low-polariton occupation of this basis.
  std::optional<PolaritonBasis> basis;

  void validate() const {
    for (double x : {kappa, n_th_a, gamma_m, n_th_m, gamma_perp, gamma_par, t_final, dt, omega_minus})
      if (!(x >= 0.0)) throw InvalidArgument("GateStudyParams: rates, occupations and times must be >= 0");
    if (composite && (n_a < 2 || n_b < 2)) throw TruncationError("GateStudyParams: n_a and n_b must be >= 2");
  }
};

struct GateStudyResult {
  Trajectory trajectory;  ///< series: fidelity, trace_distance, P_ge, P_eg
  DispersiveParams dispersive;
  double t_gate = 0.0;
  double gate_fidelity = 0.0;  ///< fidelity at the last grid point
  double n_th_a_used = 0.0;
  double n_th_m_used = 0.0;
  Matrix spin_state;  ///< reduced two-spin state at t_final
  std::vector<std::string> warnings;
};

namespace detail {

inline double capped_occupation(double n_th, std::size_t n_max, const char* mode, std::vector<std::string>& warnings) {
  const double cap = static_cast<double>(n_max) / 10.0;
  if (n_th <= cap) return n_th;
  warnings.push_back(std::string(mode) + ": n_th = " + std::to_string(n_th) + " reduced to " + std::to_string(cap) +
                     " so that n_max >= 10 n_th; the two-spin dynamics do not depend on it");
  return cap;
}

}  // namespace detail

/// Two spins under the effective flip-flop Hamiltonian in the interaction
/// picture (Delta_eff^(1) = Delta_eff^(2) enforced), with gamma_perp on both
/// spins and thermal kappa / gamma_m channels on delta_a / delta_b. Initial
/// state |g,e> (x) thermal bosons; fidelity against iswap_evolution(g_eff, t)|g,e>.
inline GateStudyResult full_dissipative_experiment(const GateStudyParams& p) {
  p.validate();
  GateStudyResult res;
  const double n_pl = p.basis ? polariton_occupation(*p.basis, p.n_th_a, p.n_th_m) : 0.0;
  res.dispersive = make_dispersive_params({p.lambda_plus1, p.lambda_plus2}, {p.delta1, p.delta2}, p.omega_minus, n_pl);
  res.warnings = res.dispersive.warnings;
  const double g = res.dispersive.g_eff;
  if (!(g > 0.0)) throw NonDispersive("full_dissipative_experiment: g_eff must be > 0");
  const double mismatch = res.dispersive.delta_eff[0] - res.dispersive.delta_eff[1];
  if (std::abs(mismatch) > 1e-9 * std::abs(res.dispersive.delta_eff[0]))
    res.warnings.push_back("Delta_eff mismatch " + std::to_string(mismatch) +
                           " rad/s dropped: resonance is enforced in the interaction picture");
  res.t_gate = iswap_time(g);

  const HilbertSpace spins = two_spin_space();
  const Vector psi0 = basis_state(spins, {1, 0});
  Matrix sm1 = embed(sigma_minus(), 0, spins).matrix();
  Matrix sz = sigma_z().matrix();

  LocalLiouvillian gen(p.composite ? HilbertSpace({2, 2, p.n_a, p.n_b}, {"spin1", "spin2", "cavity", "mechanics"})
                                   : spins);
  gen.add_hamiltonian(0, g * flip_flop().matrix());
  gen.add_dissipator(0, sm1, p.gamma_perp);
  gen.add_dissipator(1, sigma_minus().matrix(), p.gamma_perp);
  if (p.gamma_par > 0.0) {
    gen.add_dissipator(0, embed(sz, 0, spins).matrix(), p.gamma_par);
    gen.add_dissipator(1, sz, p.gamma_par);
  }

  DensityMatrix rho0 = DensityMatrix::pure(spins, psi0);
  if (p.composite) {
    res.n_th_a_used = detail::capped_occupation(p.n_th_a, p.n_a, "cavity", res.warnings);
    res.n_th_m_used = detail::capped_occupation(p.n_th_m, p.n_b, "mechanics", res.warnings);
    for (auto [n, nbar, name] : {std::tuple{p.n_a, res.n_th_a_used, "cavity"}, std::tuple{p.n_b, res.n_th_m_used, "mechanics"}})
      if (thermal_edge_occupancy(n, nbar) > 1e-6)
        res.warnings.push_back(std::string(name) + ": thermal occupancy at the truncation edge exceeds 1e-6");
    gen.add_dissipator(2, annihilation(p.n_a).matrix(), p.kappa, res.n_th_a_used);
    gen.add_dissipator(3, annihilation(p.n_b).matrix(), p.gamma_m, res.n_th_m_used);
    rho0 = DensityMatrix::product(rho0, DensityMatrix::product(thermal_state(p.n_a, res.n_th_a_used),
                                                               thermal_state(p.n_b, res.n_th_m_used)));
  }

  const HilbertSpace full = gen.space();
  auto spin_part = [full, composite = p.composite](const Matrix& rho) {
    return composite ? partial_trace(rho, full, {0, 1}) : rho;
  };
  auto ideal = [g, psi0](double t) -> Vector { return iswap_evolution(g, t) * psi0; };
  std::vector<Observable> obs{
      {"fidelity", [=](double t, const Matrix& rho) {
         const Vector psi = ideal(t);
         return std::clamp((psi.adjoint() * spin_part(rho) * psi)(0, 0).real(), 0.0, 1.0);
       }},
      {"trace_distance", [=](double t, const Matrix& rho) {
         const Vector psi = ideal(t);
         return trace_distance(spin_part(rho), psi * psi.adjoint());
       }},
      {"P_ge", [=](double, const Matrix& rho) { return spin_part(rho)(2, 2).real(); }},
      {"P_eg", [=](double, const Matrix& rho) { return spin_part(rho)(1, 1).real(); }},
  };

  const double t_final = p.t_final > 0.0 ? p.t_final : res.t_gate;
  const double dt = p.dt > 0.0 ? p.dt : default_time_step(gen.max_frequency(), gen.max_rate());
  res.trajectory = evolve(rho0, gen, t_final, dt, obs);
  res.gate_fidelity = res.trajectory.series("fidelity").back();
  res.spin_state = spin_part(res.trajectory.final_state->matrix());
  return res;
}

}  // namespace critpol
