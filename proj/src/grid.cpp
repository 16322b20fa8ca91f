#include "warpframe/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace warpframe {

ChartGrid ChartGrid::uniform(int n, int extent, double h, double center) {
  ChartGrid g;
  g.n = n;
  g.extents.assign(n, extent);
  g.spacing.assign(n, h);
  g.origin.assign(n, center - h * (extent - 1) / 2.0);
  g.base_node.assign(n, (extent - 1) / 2);
  return g;
}

std::size_t ChartGrid::node_count() const {
  std::size_t total = 1;
  for (int e : extents) total *= static_cast<std::size_t>(e);
  return total;
}

std::size_t ChartGrid::linear(const MultiIndex& idx) const {
  std::size_t out = 0;
  for (int k = 0; k < n; ++k) out = out * static_cast<std::size_t>(extents[k]) + static_cast<std::size_t>(idx[k]);
  return out;
}

MultiIndex ChartGrid::multi(std::size_t lin) const {
  MultiIndex idx(n);
  for (int k = n - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(lin % static_cast<std::size_t>(extents[k]));
    lin /= static_cast<std::size_t>(extents[k]);
  }
  return idx;
}

std::vector<double> ChartGrid::coordinates(const MultiIndex& idx) const {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = origin[k] + spacing[k] * idx[k];
  return x;
}

double ChartGrid::max_spacing() const { return *std::max_element(spacing.begin(), spacing.end()); }

bool ChartGrid::interior(const MultiIndex& idx) const {
  for (int k = 0; k < n; ++k)
    if (idx[k] <= 0 || idx[k] >= extents[k] - 1) return false;
  return true;
}

void ChartGrid::validate() const {
  if (n < 1) throw std::invalid_argument("grid dimension must be at least 1");
  if (static_cast<int>(extents.size()) != n || static_cast<int>(spacing.size()) != n ||
      static_cast<int>(origin.size()) != n || static_cast<int>(base_node.size()) != n)
    throw std::invalid_argument("grid arrays must have n entries");
  for (int k = 0; k < n; ++k) {
    if (extents[k] < 3) throw std::invalid_argument("grid extents must be at least 3 per axis");
    if (!(spacing[k] > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    if (base_node[k] < 0 || base_node[k] >= extents[k]) throw std::invalid_argument("base node outside the grid");
  }
}

ChartGrid ChartGrid::refined(int factor) const {
  ChartGrid g = *this;
  for (int k = 0; k < n; ++k) {
    g.extents[k] = (extents[k] - 1) * factor + 1;
    g.spacing[k] = spacing[k] / factor;
    g.base_node[k] = base_node[k] * factor;
  }
  return g;
}

}  // namespace warpframe
