#include "shadowgpe/spatialop.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shadowgpe {

SparseOperator laplacian(const Grid& grid) {
  const std::size_t mx = grid.interior_extent(0);
  const std::size_t my = grid.interior_extent(1);
  const double cx = 1.0 / (grid.spacing(0) * grid.spacing(0));
  const double cy = grid.dim() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;

  std::vector<Triplet> t;
  t.reserve(grid.size() * (grid.dim() == 2 ? 5 : 3));
  for (std::size_t iy = 0; iy < my; ++iy) {
    for (std::size_t ix = 0; ix < mx; ++ix) {
      const std::size_t k = grid.index(ix, iy);
      if (grid.dim() == 2 && iy > 0) t.push_back({k, grid.index(ix, iy - 1), cy});
      if (ix > 0) t.push_back({k, k - 1, cx});
      t.push_back({k, k, -2.0 * (cx + cy)});
      if (ix + 1 < mx) t.push_back({k, k + 1, cx});
      if (grid.dim() == 2 && iy + 1 < my) t.push_back({k, grid.index(ix, iy + 1), cy});
    }
  }
  return SparseOperator::from_triplets(grid.size(), std::move(t));
}

SparseOperator potential_diagonal(const Grid& grid, const PotentialFn& v) {
  const RealField values = eval_real_on_grid(grid, v);
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("potential: non-finite value on grid");
  return SparseOperator::diagonal(std::span<const double>(values));
}

SparseOperator rotation_operator(const Grid& grid, double omega) {
  if (grid.dim() != 2) throw std::invalid_argument("rotation operator requires a 2D grid");
  const std::size_t mx = grid.interior_extent(0);
  const std::size_t my = grid.interior_extent(1);
  const cplx i{0.0, 1.0};
  const double inv2hx = 1.0 / (2.0 * grid.spacing(0));
  const double inv2hy = 1.0 / (2.0 * grid.spacing(1));

  // -i omega (x D_y - y D_x); neighbours outside the interior are Dirichlet zeros.
  std::vector<Triplet> t;
  t.reserve(4 * grid.size());
  for (std::size_t iy = 0; iy < my; ++iy) {
    for (std::size_t ix = 0; ix < mx; ++ix) {
      const std::size_t k = grid.index(ix, iy);
      const auto [x, y] = grid.position(k);
      const cplx ay = -i * omega * x * inv2hy;
      const cplx ax = i * omega * y * inv2hx;
      if (iy > 0) t.push_back({k, grid.index(ix, iy - 1), -ay});
      if (ix > 0) t.push_back({k, k - 1, -ax});
      if (ix + 1 < mx) t.push_back({k, k + 1, ax});
      if (iy + 1 < my) t.push_back({k, grid.index(ix, iy + 1), ay});
    }
  }
  return SparseOperator::from_triplets(grid.size(), std::move(t));
}

PotentialFn harmonic_trap(double gamma1, double gamma2) {
  return [gamma1, gamma2](const Point& p) {
    return 0.5 * (gamma1 * p[0] * p[0] + gamma2 * p[1] * p[1]);
  };
}

PotentialFn checkerboard_trap() {
  return [](const Point& p) {
    constexpr double k = std::numbers::pi / 3.0;
    return std::floor(5.0 + 2.0 * std::sin(k * p[0]) * std::sin(k * p[1]));
  };
}

}  // namespace shadowgpe
