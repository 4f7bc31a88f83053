#pragma once

#include <span>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/model.hpp"
#include "shadowgpe/sparse.hpp"

namespace shadowgpe {

struct GroundStateResult {
  ComplexField u;
  double energy = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_sigma = 0.0;
  std::vector<double> energy_history;  // accepted iterates, seed first
};

/// Energy E0(v) = int 1/2 |grad v|^2 + V |v|^2 + Omega L_z(v) v* + kappa0/2 |v|^4
/// and its normalized gradient flow.
class GroundStateProblem {
 public:
  GroundStateProblem(const Grid& grid, const GroundStateParams& params);

  const Grid& grid() const noexcept { return grid_; }
  const GroundStateParams& params() const noexcept { return params_; }

  double energy(std::span<const cplx> v) const;
  /// <Omega L_z v, v> before the real part is taken.
  cplx rotation_term(std::span<const cplx> v) const;

  /// g with dE0 = Re sum_i conj(dv_i) g_i, i.e. g = 2 h^d (H v + kappa0 |v|^2 v).
  ComplexField gradient(std::span<const cplx> v) const;

  /// Thomas-Fermi amplitude for the configured potential, with the phase
  /// factor of a single vortex when seeding is enabled and Omega != 0.
  ComplexField seed() const;

  /// One semi-implicit flow step with pseudo-time step sigma, normalized.
  ComplexField flow_step(std::span<const cplx> u, double sigma) const;

  GroundStateResult solve() const;
  GroundStateResult solve(ComplexField initial) const;

 private:
  Grid grid_;
  GroundStateParams params_;
  RealField potential_;
  SparseOperator linear_;  // -1/2 Lap + V + Omega L_z
  SparseOperator rotation_;
};

double energy0(const Grid& grid, std::span<const cplx> v, const GroundStateParams& params);
GroundStateResult ground_state(const Grid& grid, const GroundStateParams& params);

/// Scales v to unit L2 mass.
void normalize(const Grid& grid, ComplexField& v);

/// Number of quantized vortices: plaquettes with non-zero phase winding whose
/// corners dip below 1% of the peak density while the density a short
/// distance away in all four axis directions is at least 5% of the peak.
int count_vortices(const Grid& grid, std::span<const cplx> u);

}  // namespace shadowgpe
