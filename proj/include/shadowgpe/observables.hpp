#pragma once

#include <optional>
#include <span>

#include "shadowgpe/grid.hpp"

namespace shadowgpe {

struct ObservableRecord {
  std::size_t n = 0;
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double eta = 0.0;
  double consistency_l2 = 0.0;
  double consistency_h1 = 0.0;
  std::optional<double> extended_energy;
};

struct ExtendedEnergyParams {
  double mu = 0.0;     // fictitious mass
  double omega = 1.0;  // oscillator frequency
};

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Weighted inner product sum_i w conj(u_i) v_i.
cplx inner(const Grid& grid, std::span<const cplx> u, std::span<const cplx> v);

/// sqrt(sum_i w |psi_i|^2)
double mass(const Grid& grid, std::span<const cplx> psi);

/// sum over grid edges of w |forward difference|^2, with zero extension past
/// the boundary. Equals <-Delta_h psi, psi> for the 5-point Laplacian.
double gradient_sq(const Grid& grid, std::span<const cplx> psi);

/// E(u) = int 1/2 |grad u|^2 + V |u|^2 + kappa/2 |u|^4
double energy(const Grid& grid, std::span<const cplx> psi, std::span<const double> potential,
              double kappa);

/// |E(psi) - E(phi)|
double eta(const Grid& grid, std::span<const cplx> psi, std::span<const cplx> phi,
           std::span<const double> potential, double kappa);

/// Energy of the extended (shadow) Lagrangian for the cubic nonlinearity,
/// with phi-dot approximated by (phi_n - phi_prev) / tau.
double extended_energy(const Grid& grid, std::span<const cplx> psi, std::span<const cplx> phi_n,
                       std::span<const cplx> phi_prev, double tau, const ExtendedEnergyParams& params,
                       std::span<const double> potential, double kappa);

ErrorNorms error_norms(const Grid& grid, std::span<const cplx> psi, std::span<const cplx> ref);

}  // namespace shadowgpe
