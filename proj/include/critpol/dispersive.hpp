#pragma once

// Second-order (Frohlich-Nakajima / Schrieffer-Wolff) elimination of the low
// polariton: effective two-spin flip-flop Hamiltonian, ac Stark shift, and the
// iSWAP gate it generates. Spin i sits at Delta_NV^(i) = omega_- + delta_i.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "critpol/core/hilbert.hpp"
#include "critpol/dynamics/jaynes_cummings.hpp"
#include "critpol/errors.hpp"

namespace critpol {

inline constexpr double kDispersiveWarnZeta = 0.2;

struct DispersiveParams {
  std::array<double, 2> lambda_plus{};  ///< spin-polariton couplings
  std::array<double, 2> delta{};        ///< Delta_NV^(i) - omega_-
  std::array<double, 2> delta_nv{};     ///< bare spin frequencies (rotating frame)
  std::array<double, 2> zeta{};         ///< lambda_plus / |delta|
  std::array<double, 2> delta_eff{};    ///< Stark-shifted spin frequencies
  double omega_minus = 0.0;
  double n_pl = 0.0;   ///< c-number polariton occupation
  double g_eff = 0.0;  ///< effective flip-flop coupling
  std::vector<std::string> warnings;
};

namespace detail {

inline double dispersive_zeta(double lambda_plus, double delta) {
  if (!(lambda_plus >= 0.0)) throw InvalidArgument("dispersive: lambda_+ must be >= 0");
  if (delta == 0.0) {
    if (lambda_plus == 0.0) return 0.0;
    throw NonDispersive("dispersive: zero detuning (resonant spin) is not dispersive");
  }
  const double z = lambda_plus / std::abs(delta);
  if (!(z < 1.0))
    throw NonDispersive("dispersive: zeta = " + std::to_string(z) + " >= 1; the effective Hamiltonian does not apply");
  return z;
}

}  // namespace detail

/// Delta_eff^(i) = Delta_NV^(i) + (lambda_i^2 / delta_i)(1 + 2 N_pl),
/// g_eff = (lambda_1 lambda_2 / delta_2 + lambda_2 lambda_1 / delta_1) / 2.
/// For delta_i > 0 these are lambda_i zeta_i (1 + 2 N_pl) and (lambda_1 zeta_2 + lambda_2 zeta_1) / 2.
inline DispersiveParams make_dispersive_params(std::array<double, 2> lambda_plus, std::array<double, 2> delta,
                                               double omega_minus = 0.0, double n_pl = 0.0) {
  if (!(n_pl >= 0.0)) throw InvalidArgument("dispersive: N_pl must be >= 0");
  DispersiveParams dp;
  dp.lambda_plus = lambda_plus;
  dp.delta = delta;
  dp.omega_minus = omega_minus;
  dp.n_pl = n_pl;
  std::array<double, 2> lamb{};
  for (int i = 0; i < 2; ++i) {
    dp.zeta[i] = detail::dispersive_zeta(lambda_plus[i], delta[i]);
    if (dp.zeta[i] > kDispersiveWarnZeta)
      dp.warnings.push_back("spin " + std::to_string(i + 1) + ": zeta = " + std::to_string(dp.zeta[i]) +
                            " > 0.2, dispersive approximation is marginal");
    dp.delta_nv[i] = omega_minus + delta[i];
    lamb[i] = delta[i] == 0.0 ? 0.0 : lambda_plus[i] * lambda_plus[i] / delta[i];
    dp.delta_eff[i] = dp.delta_nv[i] + lamb[i] * (1.0 + 2.0 * n_pl);
  }
  auto ratio = [&](int i, int j) { return delta[j] == 0.0 ? 0.0 : lambda_plus[i] * lambda_plus[j] / delta[j]; };
  dp.g_eff = 0.5 * (ratio(0, 1) + ratio(1, 0));
  return dp;
}

inline HilbertSpace two_spin_space() { return HilbertSpace({2, 2}, {"spin1", "spin2"}); }

/// sigma_+^(1) sigma_-^(2) + sigma_-^(1) sigma_+^(2).
inline Operator flip_flop() {
  const auto space = two_spin_space();
  const auto s1 = embed(sigma_minus(), 0, space), s2 = embed(sigma_minus(), 1, space);
  return s1.adjoint() * s2 + s1 * s2.adjoint();
}

/// sum_i Delta_eff^(i) sigma_z^(i) / 2 + g_eff (sigma_+^(1) sigma_-^(2) + h.c.).
inline Operator effective_hamiltonian(const DispersiveParams& dp) {
  for (double z : dp.zeta)
    if (!(z < 1.0)) throw NonDispersive("effective_hamiltonian: zeta >= 1");
  const auto space = two_spin_space();
  return 0.5 * dp.delta_eff[0] * embed(sigma_z(), 0, space) + 0.5 * dp.delta_eff[1] * embed(sigma_z(), 1, space) +
         dp.g_eff * flip_flop();
}

struct StarkShift {
  double zero_point = 0.0;  ///< lambda_+ zeta
  double shift = 0.0;       ///< 2 lambda_+ zeta N_pl
};

inline StarkShift stark_shift(double lambda_plus, double delta, double n_pl) {
  if (!(n_pl >= 0.0)) throw InvalidArgument("stark_shift: N_pl must be >= 0");
  detail::dispersive_zeta(lambda_plus, delta);
  const double lz = lambda_plus * lambda_plus / delta;
  return {lz, 2.0 * lz * n_pl};
}

/// Spin transition frequency in the n-polariton manifold from exact
/// diagonalization of the Jaynes-Cummings Hamiltonian, by excitation block.
inline double dressed_spin_frequency(double lambda_plus, double delta, double omega_minus, std::size_t n) {
  const std::size_t n_max = n + 3;
  const auto h = jc_hamiltonian(omega_minus + delta, omega_minus, lambda_plus, n_max).matrix();
  const auto nm = static_cast<Eigen::Index>(n_max);
  auto idx = [nm](int spin, std::size_t k) { return static_cast<Eigen::Index>(spin) * nm + static_cast<Eigen::Index>(k); };
  // Block {|e,k>, |g,k+1>}; the dressed |e,k> is the eigenvector with larger |e,k> weight.
  auto dressed = [&](std::size_t k, bool excited) {
    Eigen::Matrix2cd b;
    const Eigen::Index i0 = idx(0, k), i1 = idx(1, k + 1);
    b << h(i0, i0), h(i0, i1), h(i1, i0), h(i1, i1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(b);
    const int pick = (std::norm(es.eigenvectors()(0, 0)) > std::norm(es.eigenvectors()(0, 1))) == excited ? 0 : 1;
    return es.eigenvalues()(pick);
  };
  const double e_excited = dressed(n, true);
  const double e_ground = n == 0 ? h(idx(1, 0), idx(1, 0)).real() : dressed(n - 1, false);
  return e_excited - e_ground;
}

/// Single-polariton Stark shift from exact dressed energies.
inline double exact_stark_shift(double lambda_plus, double delta, double omega_minus = 1.0) {
  return dressed_spin_frequency(lambda_plus, delta, omega_minus, 1) -
         dressed_spin_frequency(lambda_plus, delta, omega_minus, 0);
}

/// Basis order (ee, eg, ge, gg): |ge> -> -i|eg>, |eg> -> -i|ge>, |gg>, |ee> fixed.
inline Matrix ideal_iswap() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(3, 3) = 1.0;
  u(1, 2) = -kI;
  u(2, 1) = -kI;
  return u;
}

/// exp(-i g_eff t (sigma_+ sigma_- + sigma_- sigma_+)).
inline Matrix iswap_evolution(double g_eff, double t) {
  if (!(g_eff >= 0.0)) throw InvalidArgument("iswap_evolution: g_eff must be >= 0");
  const double c = std::cos(g_eff * t), s = std::sin(g_eff * t);
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(3, 3) = 1.0;
  u(1, 1) = c;
  u(2, 2) = c;
  u(1, 2) = -kI * s;
  u(2, 1) = -kI * s;
  return u;
}

/// Gate time pi / (2 g_eff).
inline double iswap_time(double g_eff) {
  if (!(g_eff > 0.0)) throw InvalidArgument("iswap_time: g_eff must be > 0");
  return std::acos(-1.0) / (2.0 * g_eff);
}

/// Max over `samples` times in [0, t_final] of the trace distance between the
/// two-spin state of the full model (both spins JC-coupled to one polariton
/// mode, polariton in |0>) and the effective flip-flop model with N_pl = 0,
/// starting from |e,g>. Both evolve exactly in the frame rotating at omega_-.
inline double dispersive_error_check(std::array<double, 2> lambda_plus, std::array<double, 2> delta,
                                     std::size_t n_max, double t_final, std::size_t samples = 400) {
  if (n_max < 2) throw TruncationError("dispersive_error_check: n_max must be >= 2");
  if (samples < 2) throw InvalidArgument("dispersive_error_check: samples must be >= 2");
  for (int i = 0; i < 2; ++i)
    if (detail::dispersive_zeta(lambda_plus[i], delta[i]) > kDispersiveWarnZeta)
      throw NonDispersive("dispersive_error_check: requires zeta <= 0.2");
  const auto dp = make_dispersive_params(lambda_plus, delta, 0.0, 0.0);

  const HilbertSpace full({2, 2, n_max}, {"spin1", "spin2", "polariton"});
  const auto a = embed(annihilation(n_max), 2, full);
  Operator h = 0.0 * identity(full);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto sm = embed(sigma_minus(), i, full);
    h += 0.5 * delta[i] * embed(sigma_z(), i, full);
    h += lambda_plus[i] * (a.adjoint() * sm + a * sm.adjoint());
  }
  const Matrix h_eff = effective_hamiltonian(dp).matrix();

  const Vector psi_full = basis_state(full, {0, 1, 0});
  const Vector psi_eff = basis_state(two_spin_space(), {0, 1});
  Eigen::SelfAdjointEigenSolver<Matrix> es_full(h.matrix()), es_eff(h_eff);
  const Vector c_full = es_full.eigenvectors().adjoint() * psi_full;
  const Vector c_eff = es_eff.eigenvectors().adjoint() * psi_eff;

  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = t_final * static_cast<double>(k) / static_cast<double>(samples - 1);
    const Vector phase_full = (-kI * t * es_full.eigenvalues().cast<cplx>()).array().exp();
    const Vector phase_eff = (-kI * t * es_eff.eigenvalues().cast<cplx>()).array().exp();
    const Vector p = es_full.eigenvectors() * phase_full.cwiseProduct(c_full);
    const Vector q = es_eff.eigenvectors() * phase_eff.cwiseProduct(c_eff);
    const Matrix rho = partial_trace(Matrix(p * p.adjoint()), full, {0, 1});
    worst = std::max(worst, trace_distance(rho, q * q.adjoint()));
  }
  return worst;
}

}  // namespace critpol
