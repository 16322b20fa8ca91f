#pragma once

#include <cstddef>
#include <vector>

namespace warpframe {

using MultiIndex = std::vector<int>;

/// Rectangular chart lattice. Nodes are numbered row-major (last axis fastest).
struct ChartGrid {
  int n = 1;
  std::vector<int> extents;
  std::vector<double> spacing;
  std::vector<double> origin;
  MultiIndex base_node;

  static ChartGrid uniform(int n, int extent, double h, double center = 0.0);

  std::size_t node_count() const;
  std::size_t linear(const MultiIndex& idx) const;
  MultiIndex multi(std::size_t linear) const;
  std::vector<double> coordinates(const MultiIndex& idx) const;
  double max_spacing() const;
  bool interior(const MultiIndex& idx) const;
  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
  /// Same chart with each spacing divided by `factor` (extents (e-1)*factor+1).
  ChartGrid refined(int factor) const;
};

}  // namespace warpframe
