#pragma once

#include "critpol/core/hilbert.hpp"

namespace critpol {

/// Spin (x) low polariton: Delta_NV sigma_z / 2 + omega_- a^dag a + lambda_+ (a^dag sigma_- + a sigma_+).
inline Operator jc_hamiltonian(double delta_nv, double omega_minus, double lambda_plus, std::size_t n_max) {
  const HilbertSpace space({2, n_max}, {"spin", "polariton"});
  const auto a = embed(annihilation(n_max), 1, space);
  const auto sm = embed(sigma_minus(), 0, space);
  return 0.5 * delta_nv * embed(sigma_z(), 0, space) + omega_minus * (a.adjoint() * a) +
         lambda_plus * (a.adjoint() * sm + a * sm.adjoint());
}

/// a^dag a + sigma_+ sigma_-, conserved by jc_hamiltonian.
inline Operator jc_excitation_number(std::size_t n_max) {
  const HilbertSpace space({2, n_max}, {"spin", "polariton"});
  const auto a = embed(annihilation(n_max), 1, space);
  const auto sm = embed(sigma_minus(), 0, space);
  return a.adjoint() * a + sm.adjoint() * sm;
}

}  // namespace critpol
