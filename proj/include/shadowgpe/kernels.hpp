#pragma once

// Data-parallel building blocks. Every kernel exists twice: `omp` is what the
// solver uses, `serial` is the plain-loop reference the tests compare against.
//
// Reductions in `omp` sum fixed-size blocks and combine the block partials in
// order, so results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace shadowgpe::kernels {

using cplx = std::complex<double>;

/// Non-owning compressed-row view of a square sparse matrix.
struct CsrView {
  std::size_t rows = 0;
  std::span<const std::size_t> row_ptr;
  std::span<const std::size_t> col;
  std::span<const cplx> val;
};

inline constexpr std::size_t kReductionBlock = 4096;

namespace serial {
void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y);
/// sum_i conj(x_i) * y_i
cplx dot(std::span<const cplx> x, std::span<const cplx> y);
double norm_sq(std::span<const cplx> x);
/// y += a * x
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
/// y = x + b * y
void xpby(std::span<const cplx> x, cplx b, std::span<cplx> y);
/// out = sum_j coeff[j] * fields[j]
void combine(std::span<const double> coeff, std::span<const std::span<const cplx>> fields,
             std::span<cplx> out);
/// out_i = d_i * x_i (pointwise product)
void pointwise(std::span<const cplx> d, std::span<const cplx> x, std::span<cplx> out);
}  // namespace serial

namespace omp {
void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y);
cplx dot(std::span<const cplx> x, std::span<const cplx> y);
double norm_sq(std::span<const cplx> x);
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
void xpby(std::span<const cplx> x, cplx b, std::span<cplx> y);
void combine(std::span<const double> coeff, std::span<const std::span<const cplx>> fields,
             std::span<cplx> out);
void pointwise(std::span<const cplx> d, std::span<const cplx> x, std::span<cplx> out);
}  // namespace omp

}  // namespace shadowgpe::kernels
