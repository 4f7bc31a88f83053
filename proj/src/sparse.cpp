#include "shadowgpe/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace shadowgpe {

SparseOperator SparseOperator::from_triplets(std::size_t n, std::vector<Triplet> entries) {
  for (const auto& t : entries)
    if (t.row >= n || t.col >= n) throw std::out_of_range("sparse: triplet index out of range");
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator op;
  op.n_ = n;
  op.row_ptr_.assign(n + 1, 0);
  op.diag_pos_.assign(n, -1);
  op.col_.reserve(entries.size());
  op.val_.reserve(entries.size());

  std::size_t i = 0;
  while (i < entries.size()) {
    const std::size_t r = entries[i].row, c = entries[i].col;
    cplx sum{};
    for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i)
      sum += entries[i].value;
    if (sum == cplx{}) continue;
    if (r == c) op.diag_pos_[r] = static_cast<std::ptrdiff_t>(op.val_.size());
    op.col_.push_back(c);
    op.val_.push_back(sum);
    ++op.row_ptr_[r + 1];
  }
  for (std::size_t r = 0; r < n; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
  return op;
}

SparseOperator SparseOperator::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, std::move(t));
}

SparseOperator SparseOperator::diagonal(std::span<const cplx> d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return from_triplets(d.size(), std::move(t));
}

SparseOperator SparseOperator::diagonal(std::span<const double> d) {
  ComplexField c(d.begin(), d.end());
  return diagonal(std::span<const cplx>(c));
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("sparse: dimension mismatch");
  kernels::omp::spmv(view(), x, y);
}

ComplexField SparseOperator::apply(std::span<const cplx> x) const {
  ComplexField y(n_);
  apply(x, y);
  return y;
}

cplx SparseOperator::at(std::size_t r, std::size_t c) const {
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(r));
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(r + 1));
  const auto it = std::lower_bound(first, last, c);
  return (it != last && *it == c) ? val_[static_cast<std::size_t>(it - col_.begin())] : cplx{};
}

ComplexField SparseOperator::diagonal_values() const {
  ComplexField d(n_);
  for (std::size_t r = 0; r < n_; ++r)
    if (diag_pos_[r] >= 0) d[r] = val_[static_cast<std::size_t>(diag_pos_[r])];
  return d;
}

bool SparseOperator::is_symmetric() const {
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      if (at(col_[p], r) != val_[p]) return false;
  return true;
}

SparseOperator SparseOperator::scaled_plus_diagonal(cplx scale, std::span<const cplx> shift) const {
  if (shift.size() != n_) throw std::invalid_argument("sparse: diagonal length mismatch");
  const bool has_all_diagonals =
      std::none_of(diag_pos_.begin(), diag_pos_.end(), [](std::ptrdiff_t p) { return p < 0; });
  if (has_all_diagonals) {
    SparseOperator out = *this;
    const auto nnz = static_cast<std::ptrdiff_t>(out.val_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < nnz; ++p) out.val_[p] *= scale;
    bool zero_found = false;
    for (std::size_t r = 0; r < n_; ++r) {
      auto& v = out.val_[static_cast<std::size_t>(diag_pos_[r])];
      v += shift[r];
      zero_found |= (v == cplx{});
    }
    if (scale != cplx{} && !zero_found) return out;
  }
  std::vector<Triplet> t = triplets();
  for (auto& e : t) e.value *= scale;
  for (std::size_t r = 0; r < n_; ++r) t.push_back({r, r, shift[r]});
  return from_triplets(n_, std::move(t));
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> t;
  t.reserve(val_.size());
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({r, col_[p], val_[p]});
  return t;
}

SparseOperator linear_combination(cplx a, const SparseOperator& A, cplx b, const SparseOperator& B) {
  if (A.size() != B.size()) throw std::invalid_argument("sparse: dimension mismatch");
  auto t = A.triplets();
  for (auto& e : t) e.value *= a;
  for (auto e : B.triplets()) {
    e.value *= b;
    t.push_back(e);
  }
  return SparseOperator::from_triplets(A.size(), std::move(t));
}

}  // namespace shadowgpe
