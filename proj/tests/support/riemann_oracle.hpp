#pragma once

// Brute-force Levi-Civita connection and curvature of a metric given in
// coordinates, differentiated with dual numbers. Used as a reference for the
// closed forms in the library.

#include <array>
#include <cmath>

#include "warpframe/dual.hpp"

namespace oracle {

template <class S, int D>
using Mat = std::array<std::array<S, D>, D>;
template <class S, int D>
using Vec = std::array<S, D>;

template <class S, int D>
Mat<S, D> inverse(Mat<S, D> a) {
  Mat<S, D> inv{};
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) inv[i][j] = S(0.0);
    inv[i][i] = S(1.0);
  }
  for (int col = 0; col < D; ++col) {
    int piv = col;
    for (int r = col + 1; r < D; ++r)
      if (std::abs(warpframe::primal(a[r][col])) > std::abs(warpframe::primal(a[piv][col]))) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const S d = S(1.0) / a[col][col];
    for (int c = 0; c < D; ++c) {
      a[col][c] = a[col][c] * d;
      inv[col][c] = inv[col][c] * d;
    }
    for (int r = 0; r < D; ++r) {
      if (r == col) continue;
      const S f = a[r][col];
      for (int c = 0; c < D; ++c) {
        a[r][c] = a[r][c] - f * a[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

/// gamma[l][i][j] = Gamma^l_ij.
template <class S, int D, class Metric>
std::array<Mat<S, D>, D> christoffel(const Metric& metric, const Vec<S, D>& y) {
  using DS = warpframe::Dual<S>;
  std::array<Mat<S, D>, D> dg{};  // dg[k] = d_k g
  for (int k = 0; k < D; ++k) {
    Vec<DS, D> yd;
    for (int i = 0; i < D; ++i) yd[i] = DS(y[i], S(i == k ? 1.0 : 0.0));
    const Mat<DS, D> gd = metric(yd);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) dg[k][i][j] = gd[i][j].d;
  }
  const Mat<S, D> ginv = inverse<S, D>(metric(y));
  std::array<Mat<S, D>, D> out{};
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        S acc(0.0);
        for (int m = 0; m < D; ++m) acc = acc + ginv[l][m] * (dg[i][j][m] + dg[j][i][m] - dg[m][i][j]);
        out[l][i][j] = 0.5 * acc;
      }
  return out;
}

/// R[a][b][c][d] = <R(d_a, d_b) d_c, d_d> with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
template <int D, class Metric>
std::array<std::array<Mat<double, D>, D>, D> riemann(const Metric& metric, const Vec<double, D>& y) {
  using D1 = warpframe::Dual<double>;
  const auto G = christoffel<double, D>(metric, y);
  std::array<std::array<Mat<double, D>, D>, D> dG{};  // dG[k][l][i][j] = d_k Gamma^l_ij
  for (int k = 0; k < D; ++k) {
    Vec<D1, D> yd;
    for (int i = 0; i < D; ++i) yd[i] = D1(y[i], i == k ? 1.0 : 0.0);
    const auto Gd = christoffel<D1, D>(metric, yd);
    for (int l = 0; l < D; ++l)
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) dG[k][l][i][j] = Gd[l][i][j].d;
  }
  const Mat<double, D> g = metric(y);
  std::array<std::array<Mat<double, D>, D>, D> R{};
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c) {
        Vec<double, D> up{};
        for (int l = 0; l < D; ++l) {
          double v = dG[a][l][b][c] - dG[b][l][a][c];
          for (int m = 0; m < D; ++m) v += G[l][a][m] * G[m][b][c] - G[l][b][m] * G[m][a][c];
          up[l] = v;
        }
        for (int d = 0; d < D; ++d) {
          double v = 0.0;
          for (int l = 0; l < D; ++l) v += up[l] * g[l][d];
          R[a][b][c][d] = v;
        }
      }
  return R;
}

template <int D, class Tensor>
double contract(const Tensor& R, const Vec<double, D>& X, const Vec<double, D>& Y, const Vec<double, D>& Z,
                const Vec<double, D>& W) {
  double s = 0.0;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c)
        for (int d = 0; d < D; ++d) s += R[a][b][c][d] * X[a] * Y[b] * Z[c] * W[d];
  return s;
}

}  // namespace oracle
