#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace shadowgpe {

using cplx = std::complex<double>;

/// Complex values at the interior nodes of a Grid, in interior-index order.
using ComplexField = std::vector<cplx>;
using RealField = std::vector<double>;

/// Physical coordinates of a node. The second entry is 0 on 1D grids.
using Point = std::array<double, 2>;

struct Interval {
  double lo;
  double hi;
  bool operator==(const Interval&) const = default;
};

/// Uniform tensor grid over a rectangle (or interval) with homogeneous
/// Dirichlet boundary. Only interior nodes carry unknowns; they are numbered
/// x-fastest: k = ix + mx * iy with 0 <= ix < mx = n_x - 2.
class Grid {
 public:
  Grid(std::vector<Interval> bounds, std::vector<std::size_t> nodes);

  std::size_t dim() const noexcept { return dim_; }
  const Interval& bounds(std::size_t d) const { return bounds_.at(d); }
  /// Nodes along dimension d, boundary included.
  std::size_t nodes(std::size_t d) const { return n_.at(d); }
  /// Interior nodes along dimension d (1 for the unused axis of a 1D grid).
  std::size_t interior_extent(std::size_t d) const { return d < dim_ ? n_.at(d) - 2 : 1; }
  double spacing(std::size_t d) const { return h_.at(d); }

  /// Interior node count M.
  std::size_t size() const noexcept { return size_; }
  /// Quadrature weight h^d shared by every interior node.
  double quad_weight() const noexcept { return weight_; }

  /// Coordinate of full-grid node i (0 <= i < nodes(d)) along dimension d.
  double coordinate(std::size_t d, std::size_t i) const;
  Point position(std::size_t k) const;

  std::size_t index(std::size_t ix, std::size_t iy = 0) const noexcept {
    return ix + interior_extent(0) * iy;
  }
  std::array<std::size_t, 2> multi_index(std::size_t k) const noexcept {
    const std::size_t mx = interior_extent(0);
    return {k % mx, k / mx};
  }

  std::vector<Interval> bounds_list() const;
  std::vector<std::size_t> nodes_list() const;

  bool operator==(const Grid& other) const;

 private:
  std::size_t dim_;
  std::array<Interval, 2> bounds_{};
  std::array<std::size_t, 2> n_{};
  std::array<double, 2> h_{};
  std::size_t size_;
  double weight_;
};

Grid build_grid(std::vector<Interval> bounds, std::vector<std::size_t> nodes);

ComplexField eval_on_grid(const Grid& grid, const std::function<cplx(const Point&)>& f);
RealField eval_real_on_grid(const Grid& grid, const std::function<double(const Point&)>& f);

}  // namespace shadowgpe
