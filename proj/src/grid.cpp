#include "shadowgpe/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shadowgpe {

Grid::Grid(std::vector<Interval> bounds, std::vector<std::size_t> nodes) {
  if (bounds.empty() || bounds.size() > 2 || bounds.size() != nodes.size())
    throw std::invalid_argument("grid: need 1 or 2 dimensions with matching node counts");
  dim_ = bounds.size();
  size_ = 1;
  weight_ = 1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const auto [lo, hi] = bounds[d];
    if (!(std::isfinite(lo) && std::isfinite(hi)) || !(hi > lo))
      throw std::invalid_argument("grid: degenerate interval in dimension " + std::to_string(d));
    if (nodes[d] < 3)
      throw std::invalid_argument("grid: need at least 3 nodes per dimension (got " +
                                  std::to_string(nodes[d]) + ")");
    bounds_[d] = bounds[d];
    n_[d] = nodes[d];
    h_[d] = (hi - lo) / static_cast<double>(nodes[d] - 1);
    size_ *= nodes[d] - 2;
    weight_ *= h_[d];
  }
}

double Grid::coordinate(std::size_t d, std::size_t i) const {
  // Convex combination keeps the grid symmetric: the midpoint of a symmetric
  // interval is exactly 0.
  const auto [lo, hi] = bounds_.at(d);
  const double last = static_cast<double>(n_[d] - 1);
  const double fi = static_cast<double>(i);
  return (lo * (last - fi) + hi * fi) / last;
}

Point Grid::position(std::size_t k) const {
  const auto [ix, iy] = multi_index(k);
  Point p{coordinate(0, ix + 1), 0.0};
  if (dim_ == 2) p[1] = coordinate(1, iy + 1);
  return p;
}

std::vector<Interval> Grid::bounds_list() const {
  return {bounds_.begin(), bounds_.begin() + static_cast<std::ptrdiff_t>(dim_)};
}

std::vector<std::size_t> Grid::nodes_list() const {
  return {n_.begin(), n_.begin() + static_cast<std::ptrdiff_t>(dim_)};
}

bool Grid::operator==(const Grid& other) const {
  return bounds_list() == other.bounds_list() && nodes_list() == other.nodes_list();
}

Grid build_grid(std::vector<Interval> bounds, std::vector<std::size_t> nodes) {
  return Grid(std::move(bounds), std::move(nodes));
}

ComplexField eval_on_grid(const Grid& grid, const std::function<cplx(const Point&)>& f) {
  ComplexField out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(grid.position(k));
  return out;
}

RealField eval_real_on_grid(const Grid& grid, const std::function<double(const Point&)>& f) {
  RealField out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(grid.position(k));
  return out;
}

}  // namespace shadowgpe
