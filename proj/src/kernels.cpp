#include "shadowgpe/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <vector>

namespace shadowgpe::kernels {

namespace serial {

void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == a.rows && y.size() == a.rows);
  for (std::size_t r = 0; r < a.rows; ++r) {
    cplx acc{};
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) acc += a.val[p] * x[a.col[p]];
    y[r] = acc;
  }
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  assert(x.size() == y.size());
  cplx acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double norm_sq(std::span<const cplx> x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return acc;
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void xpby(std::span<const cplx> x, cplx b, std::span<cplx> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

void combine(std::span<const double> coeff, std::span<const std::span<const cplx>> fields,
             std::span<cplx> out) {
  assert(coeff.size() == fields.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx acc{};
    for (std::size_t j = 0; j < coeff.size(); ++j) acc += coeff[j] * fields[j][i];
    out[i] = acc;
  }
}

void pointwise(std::span<const cplx> d, std::span<const cplx> x, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[i] * x[i];
}

}  // namespace serial

namespace omp {

namespace {

template <class BlockFn>
auto blocked_sum(std::size_t n, BlockFn&& block) {
  using T = decltype(block(std::size_t{0}, std::size_t{0}));
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<T> partial(nblocks);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block(lo, hi);
  }
  T acc{};
  for (const auto& p : partial) acc += p;
  return acc;
}

}  // namespace

void spmv(const CsrView& a, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == a.rows && y.size() == a.rows);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    cplx acc{};
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) acc += a.val[p] * x[a.col[p]];
    y[r] = acc;
  }
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  assert(x.size() == y.size());
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    cplx acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
  });
}

double norm_sq(std::span<const cplx> x) {
  return blocked_sum(x.size(), [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += std::norm(x[i]);
    return acc;
  });
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(std::span<const cplx> x, cplx b, std::span<cplx> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void combine(std::span<const double> coeff, std::span<const std::span<const cplx>> fields,
             std::span<cplx> out) {
  assert(coeff.size() == fields.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const std::size_t nf = coeff.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cplx acc{};
    for (std::size_t j = 0; j < nf; ++j) acc += coeff[j] * fields[j][i];
    out[i] = acc;
  }
}

void pointwise(std::span<const cplx> d, std::span<const cplx> x, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = d[i] * x[i];
}

}  // namespace omp

}  // namespace shadowgpe::kernels
