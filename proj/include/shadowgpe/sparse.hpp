#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "shadowgpe/grid.hpp"
#include "shadowgpe/kernels.hpp"

namespace shadowgpe {

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

/// Square complex matrix in compressed-row form. Entries are stored in
/// row-major coordinate order, without duplicates and without explicit zeros.
class SparseOperator {
 public:
  SparseOperator() = default;

  /// Sums duplicate (row, col) pairs and drops entries that end up zero.
  static SparseOperator from_triplets(std::size_t n, std::vector<Triplet> entries);
  static SparseOperator identity(std::size_t n);
  static SparseOperator diagonal(std::span<const cplx> d);
  static SparseOperator diagonal(std::span<const double> d);

  std::size_t size() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return val_.size(); }

  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  ComplexField apply(std::span<const cplx> x) const;

  /// Entry (r, c), zero if not stored.
  cplx at(std::size_t r, std::size_t c) const;
  ComplexField diagonal_values() const;
  bool is_symmetric() const;

  /// scale * this + diag(shift).
  SparseOperator scaled_plus_diagonal(cplx scale, std::span<const cplx> shift) const;

  std::vector<Triplet> triplets() const;
  kernels::CsrView view() const noexcept { return {n_, row_ptr_, col_, val_}; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<cplx> val_;
  std::vector<std::ptrdiff_t> diag_pos_;  // -1 where the row has no stored diagonal
};

/// a * A + b * B
SparseOperator linear_combination(cplx a, const SparseOperator& A, cplx b, const SparseOperator& B);

}  // namespace shadowgpe
