#pragma once

#include <vector>

#include "warpframe/ambient.hpp"
#include "warpframe/bundle_data.hpp"

namespace fixtures {

inline warpframe::SignatureSpec spec_of(int n, int m, int eps, int c, std::vector<int> signs) {
  warpframe::SignatureSpec s;
  s.n = n;
  s.m = m;
  s.N = n + m - 1;
  s.epsilon = eps;
  s.c = c;
  s.signs = std::move(signs);
  int neg = 0;
  for (int a = 1; a <= n; ++a) s.p += s.signs[a] < 0;
  for (int a = n + 1; a <= n + m; ++a) s.q += s.signs[a] < 0;
  for (int a = 0; a <= s.N; ++a) neg += s.signs[a] < 0;
  s.lambda = neg - (c == -1 ? 1 : 0);
  return s;
}

/// Identity frames, zero connection and alpha, T = 0, xi = first bundle direction, pi = t0.
/// A well-formed document; it is not the data of an actual immersion unless a = const and
/// the chart is flat, which the Gauss equation will point out.
inline warpframe::GeometricData flat_data(int n, int m, int extent = 5, double h = 0.1, double t0 = 0.2) {
  using namespace warpframe;
  GeometricData d;
  std::vector<int> signs(static_cast<std::size_t>(n + m + 1), 1);
  d.spec = spec_of(n, m, 1, 1, signs);
  d.warping = WarpingFunction::constant(1.0);
  d.grid = ChartGrid::uniform(n, extent, h);
  const std::size_t nodes = d.grid.node_count();
  d.fields = FieldArrays::zeros(n, m, nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    for (int i = 0; i < n; ++i) d.fields.frame[v * n * n + i * n + i] = 1.0;
    d.fields.xi[v * m] = 1.0;
    d.fields.pi[v] = t0;
  }
  return d;
}

}  // namespace fixtures
