#pragma once

#include <functional>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/sparse.hpp"

namespace shadowgpe {

using PotentialFn = std::function<double(const Point&)>;

/// Central-difference Laplacian (3-point in 1D, 5-point in 2D) with
/// homogeneous Dirichlet closure.
SparseOperator laplacian(const Grid& grid);

SparseOperator potential_diagonal(const Grid& grid, const PotentialFn& v);

/// omega * L_z with L_z = -i (x d/dy - y d/dx), central differences.
/// Hermitian with respect to the grid inner product on uniform grids.
SparseOperator rotation_operator(const Grid& grid, double omega);

/// 0.5 * (g1 x^2 + g2 y^2)
PotentialFn harmonic_trap(double gamma1, double gamma2);

/// floor(5 + 2 sin(pi x / 3) sin(pi y / 3)), evaluated pointwise.
PotentialFn checkerboard_trap();

}  // namespace shadowgpe
