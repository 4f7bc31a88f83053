#pragma once

#include <cstddef>
#include <span>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/sparse.hpp"

namespace shadowgpe {

struct SolveReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  ComplexField x;
  SolveReport report;
};

inline constexpr double kDefaultSolveTol = 1e-10;

/// 10 * sqrt(M), at least 50.
std::size_t default_max_iter(std::size_t m);

/// Jacobi-preconditioned BiCGStab for general complex systems. Convergence is
/// judged on the true residual ||b - A x||_2 <= tol * ||b||_2. A non-converged
/// result is returned, not thrown; dimension mismatch throws.
SolveResult solve(const SparseOperator& a, std::span<const cplx> b, double tol = kDefaultSolveTol,
                  std::size_t max_iter = 0, std::span<const cplx> x0 = {});

}  // namespace shadowgpe
