#include "shadowgpe/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shadowgpe/kernels.hpp"

namespace shadowgpe {

namespace {

void check_size(const Grid& grid, std::size_t n) {
  if (n != grid.size()) throw std::invalid_argument("field does not match grid size");
}

}  // namespace

cplx inner(const Grid& grid, std::span<const cplx> u, std::span<const cplx> v) {
  check_size(grid, u.size());
  check_size(grid, v.size());
  return grid.quad_weight() * kernels::omp::dot(u, v);
}

double mass(const Grid& grid, std::span<const cplx> psi) {
  check_size(grid, psi.size());
  return std::sqrt(grid.quad_weight() * kernels::omp::norm_sq(psi));
}

double gradient_sq(const Grid& grid, std::span<const cplx> psi) {
  check_size(grid, psi.size());
  const std::size_t mx = grid.interior_extent(0);
  const std::size_t my = grid.interior_extent(1);
  const double ihx2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  const double ihy2 = grid.dim() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;

  // Per-line partials combined in a fixed order keep the sum independent of
  // the thread count.
  std::vector<double> partial(my + (grid.dim() == 2 ? mx : 0), 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(my);
#pragma omp parallel for schedule(static) if (grid.size() > 20000)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto iy = static_cast<std::size_t>(r);
    // mx + 1 edges per line; the outer two reach the boundary.
    double acc = std::norm(psi[grid.index(0, iy)]);
    for (std::size_t ix = 1; ix < mx; ++ix)
      acc += std::norm(psi[grid.index(ix, iy)] - psi[grid.index(ix - 1, iy)]);
    acc += std::norm(psi[grid.index(mx - 1, iy)]);
    partial[iy] = ihx2 * acc;
  }
  if (grid.dim() == 2) {
    const auto cols = static_cast<std::ptrdiff_t>(mx);
#pragma omp parallel for schedule(static) if (grid.size() > 20000)
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      const auto ix = static_cast<std::size_t>(c);
      double acc = std::norm(psi[grid.index(ix, 0)]);
      for (std::size_t iy = 1; iy < my; ++iy)
        acc += std::norm(psi[grid.index(ix, iy)] - psi[grid.index(ix, iy - 1)]);
      acc += std::norm(psi[grid.index(ix, my - 1)]);
      partial[my + ix] = ihy2 * acc;
    }
  }
  double acc = 0.0;
  for (double v : partial) acc += v;
  return grid.quad_weight() * acc;
}

double energy(const Grid& grid, std::span<const cplx> psi, std::span<const double> potential,
              double kappa) {
  check_size(grid, psi.size());
  check_size(grid, potential.size());
  double local = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    local += potential[i] * rho + 0.5 * kappa * rho * rho;
  }
  return 0.5 * gradient_sq(grid, psi) + grid.quad_weight() * local;
}

double eta(const Grid& grid, std::span<const cplx> psi, std::span<const cplx> phi,
           std::span<const double> potential, double kappa) {
  return std::abs(energy(grid, psi, potential, kappa) - energy(grid, phi, potential, kappa));
}

double extended_energy(const Grid& grid, std::span<const cplx> psi, std::span<const cplx> phi_n,
                       std::span<const cplx> phi_prev, double tau, const ExtendedEnergyParams& params,
                       std::span<const double> potential, double kappa) {
  check_size(grid, psi.size());
  check_size(grid, phi_n.size());
  check_size(grid, phi_prev.size());
  check_size(grid, potential.size());
  if (!(tau > 0.0)) throw std::invalid_argument("extended_energy: tau must be positive");
  if (params.mu < 0.0 || !(params.omega > 0.0))
    throw std::invalid_argument("extended_energy: need mu >= 0 and omega > 0");

  // With V[rho] = 2 V0 + kappa rho: (V - rho V') / 2 = V0 and rho V' = kappa rho.
  const double spring = params.mu * params.omega * params.omega;
  double local = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(phi_n[i]);
    const cplx phi_dot = (phi_n[i] - phi_prev[i]) / tau;
    local += 0.5 * params.mu * std::norm(phi_dot) + potential[i] * std::norm(psi[i]) +
             0.5 * spring * std::norm(psi[i] - phi_n[i]) +
             0.5 * kappa * rho * std::norm(2.0 * psi[i] - phi_n[i]);
  }
  return 0.5 * gradient_sq(grid, phi_n) + grid.quad_weight() * local;
}

ErrorNorms error_norms(const Grid& grid, std::span<const cplx> psi, std::span<const cplx> ref) {
  if (psi.size() != ref.size()) throw std::invalid_argument("error_norms: grid mismatch");
  check_size(grid, psi.size());
  ComplexField diff(psi.begin(), psi.end());
  kernels::omp::axpy(-1.0, ref, diff);
  const double l2sq = grid.quad_weight() * kernels::omp::norm_sq(diff);
  return {std::sqrt(l2sq), std::sqrt(l2sq + gradient_sq(grid, diff))};
}

}  // namespace shadowgpe
