#include "shadowgpe/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shadowgpe/kernels.hpp"
#include "shadowgpe/linsolve.hpp"
#include "shadowgpe/observables.hpp"
#include "shadowgpe/spatialop.hpp"

namespace shadowgpe {

namespace {
constexpr double kFlowSolveTol = 1e-12;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kMinSigma = 1e-10;
}  // namespace

GroundStateProblem::GroundStateProblem(const Grid& grid, const GroundStateParams& params)
    : grid_(grid), params_(params) {
  params_.validate();
  potential_ = eval_real_on_grid(grid_, params_.potential.function());
  const SparseOperator lap = laplacian(grid_);
  linear_ = linear_combination(-0.5, lap, 1.0, SparseOperator::diagonal(std::span<const double>(potential_)));
  if (params_.omega != 0.0) {
    rotation_ = rotation_operator(grid_, params_.omega);
    linear_ = linear_combination(1.0, linear_, 1.0, rotation_);
  }
}

cplx GroundStateProblem::rotation_term(std::span<const cplx> v) const {
  if (params_.omega == 0.0) return {};
  return inner(grid_, v, rotation_.apply(v));
}

double GroundStateProblem::energy(std::span<const cplx> v) const {
  if (v.size() != grid_.size()) throw std::invalid_argument("energy0: field does not match grid");
  double local = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rho = std::norm(v[i]);
    local += potential_[i] * rho + 0.5 * params_.kappa0 * rho * rho;
  }
  return 0.5 * gradient_sq(grid_, v) + grid_.quad_weight() * local + rotation_term(v).real();
}

ComplexField GroundStateProblem::gradient(std::span<const cplx> v) const {
  ComplexField g = linear_.apply(v);
  const double w2 = 2.0 * grid_.quad_weight();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = w2 * (g[i] + params_.kappa0 * std::norm(v[i]) * v[i]);
  return g;
}

ComplexField GroundStateProblem::seed() const {
  const std::size_t m = grid_.size();
  RealField amp(m, 0.0);
  if (params_.kappa0 > 0.0) {
    // rho_TF = max(mu - V, 0) / kappa0 with mu fixed by unit mass (bisection).
    const double w = grid_.quad_weight();
    const auto mass_at = [&](double mu) {
      double s = 0.0;
      for (double v : potential_) s += std::max(mu - v, 0.0);
      return w * s / params_.kappa0;
    };
    double lo = *std::min_element(potential_.begin(), potential_.end());
    double hi = lo + 1.0;
    while (mass_at(hi) < 1.0 && hi < 1e12) hi = lo + 2.0 * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mass_at(mid) < 1.0 ? lo : hi) = mid;
    }
    for (std::size_t i = 0; i < m; ++i) amp[i] = std::sqrt(std::max(hi - potential_[i], 0.0) / params_.kappa0);
  }
  // Smooth background so the seed has full support.
  const double vmin = *std::min_element(potential_.begin(), potential_.end());
  for (std::size_t i = 0; i < m; ++i) amp[i] += std::exp(-(potential_[i] - vmin)) * (params_.kappa0 > 0.0 ? 1e-2 : 1.0);

  ComplexField u(m);
  const bool vortex = params_.seed_phase && params_.omega != 0.0 && grid_.dim() == 2;
  // +Omega L_z in E0 favours negative angular momentum for Omega > 0.
  const double sense = params_.omega > 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    cplx phase{1.0};
    if (vortex) {
      const auto [x, y] = grid_.position(i);
      const double r = std::hypot(x, y);
      phase = r > 0.0 ? cplx{x, sense * y} / r : cplx{};
    }
    u[i] = amp[i] * phase;
  }
  normalize(grid_, u);
  return u;
}

ComplexField GroundStateProblem::flow_step(std::span<const cplx> u, double sigma) const {
  // (I + sigma (H + kappa0 |u|^2)) u~ = u; the frozen density keeps the
  // normalized fixed point equal to the nonlinear eigenstate.
  ComplexField shift(grid_.size());
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = 1.0 + sigma * params_.kappa0 * std::norm(u[i]);
  const SparseOperator a = linear_.scaled_plus_diagonal(sigma, shift);
  auto [next, report] = shadowgpe::solve(a, u, kFlowSolveTol, 0, u);
  if (!report.converged) throw std::runtime_error("ground state: linear solve did not converge");
  normalize(grid_, next);
  return std::move(next);
}

GroundStateResult GroundStateProblem::solve() const { return solve(seed()); }

GroundStateResult GroundStateProblem::solve(ComplexField initial) const {
  GroundStateResult res;
  res.u = std::move(initial);
  normalize(grid_, res.u);
  res.energy = energy(res.u);
  res.energy_history.push_back(res.energy);
  double sigma = params_.sigma;

  while (res.iterations < params_.max_iter) {
    ++res.iterations;
    ComplexField next = flow_step(res.u, sigma);
    const double e = energy(next);
    if (e > res.energy + kMonotoneSlack) {
      sigma *= 0.5;
      if (sigma < kMinSigma) break;
      continue;
    }
    const double drop = res.energy - e;
    res.u = std::move(next);
    res.energy = e;
    res.energy_history.push_back(e);
    // Drop measured per nominal step so a reduced sigma cannot fake convergence.
    if (std::abs(drop) * (params_.sigma / sigma) < params_.energy_tol) {
      res.converged = true;
      break;
    }
  }
  res.final_sigma = sigma;
  return res;
}

double energy0(const Grid& grid, std::span<const cplx> v, const GroundStateParams& params) {
  return GroundStateProblem(grid, params).energy(v);
}

GroundStateResult ground_state(const Grid& grid, const GroundStateParams& params) {
  return GroundStateProblem(grid, params).solve();
}

void normalize(const Grid& grid, ComplexField& v) {
  const double m = mass(grid, v);
  if (!(m > 0.0)) throw std::invalid_argument("normalize: zero field");
  for (auto& z : v) z /= m;
}

int count_vortices(const Grid& grid, std::span<const cplx> u) {
  if (grid.dim() != 2) return 0;
  const std::size_t mx = grid.interior_extent(0), my = grid.interior_extent(1);
  RealField rho(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::norm(u[i]);
  const double peak = *std::max_element(rho.begin(), rho.end());
  if (!(peak > 0.0)) return 0;

  const auto reach = static_cast<std::size_t>(std::max(3.0, std::round(0.5 / grid.spacing(0))));
  const auto wrap = [](double d) { return std::remainder(d, 2.0 * std::numbers::pi); };
  int count = 0;
  for (std::size_t iy = reach; iy + 1 + reach < my; ++iy) {
    for (std::size_t ix = reach; ix + 1 + reach < mx; ++ix) {
      const std::size_t c[4] = {grid.index(ix, iy), grid.index(ix + 1, iy), grid.index(ix + 1, iy + 1),
                                grid.index(ix, iy + 1)};
      double lowest = rho[c[0]];
      for (auto k : c) lowest = std::min(lowest, rho[k]);
      if (lowest >= 0.01 * peak) continue;
      double winding = 0.0;
      for (int e = 0; e < 4; ++e) winding += wrap(std::arg(u[c[(e + 1) % 4]]) - std::arg(u[c[e]]));
      if (std::lround(winding / (2.0 * std::numbers::pi)) == 0) continue;
      const bool embedded = rho[grid.index(ix - reach, iy)] >= 0.05 * peak &&
                            rho[grid.index(ix + 1 + reach, iy)] >= 0.05 * peak &&
                            rho[grid.index(ix, iy - reach)] >= 0.05 * peak &&
                            rho[grid.index(ix, iy + 1 + reach)] >= 0.05 * peak;
      if (embedded) ++count;
    }
  }
  return count;
}

}  // namespace shadowgpe
