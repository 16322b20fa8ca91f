#pragma once

// The hypothesis bundle on a chart grid: orthonormal frames of TM and E,
// connection coefficients against the coordinate directions, the symmetric
// E-valued form alpha, the splitting dt = T + xi and the height function pi.

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "warpframe/ambient.hpp"
#include "warpframe/dual.hpp"
#include "warpframe/grid.hpp"

namespace warpframe {

/// Flat per-node arrays. Layouts (per node, row-major):
///   frame         [k][i]     coordinate component k of e_i
///   omega_tangent [k][i][j]  omega_ij(d_k)
///   omega_bundle  [k][u][v]  omega_uv(d_k), u,v in 0..m-1
///   alpha         [u][i][j]  eps_u <alpha(e_i,e_j), e_u>
///   T             [i]        T = sum T^i e_i
///   xi            [u]        xi = sum xi^u e_u
///   pi            scalar
struct FieldArrays {
  std::vector<double> frame, omega_tangent, omega_bundle, alpha, T, xi, pi;

  static FieldArrays zeros(int n, int m, std::size_t nodes);
};

struct FieldSizes {
  int frame, omega_tangent, omega_bundle, alpha, T, xi, pi;
  static FieldSizes of(int n, int m) { return {n * n, n * n * n, n * m * m, m * n * n, n, m, 1}; }
};

/// Where an oracle-generated document came from, so it can be regenerated at other spacings.
struct Provenance {
  std::string family;
  std::map<std::string, std::string> params;
};

struct GeometricData {
  SignatureSpec spec;
  WarpingFunction warping;
  ChartGrid grid;
  FieldArrays fields;
  /// Empty, or n entries: derivatives[k] holds d/dx_k of every field.
  std::vector<FieldArrays> derivatives;
  std::optional<Provenance> source;

  int n() const { return spec.n; }
  int m() const { return spec.m; }
  bool has_derivatives() const { return !derivatives.empty(); }
};

/// Section of F = TM + E in frame components.
struct FVector {
  Eigen::VectorXd tangent;
  Eigen::VectorXd bundle;
  std::size_t node = 0;
};

enum class DerivativeMode {
  prefer_analytic,  // use stored derivative fields when present
  finite_difference
};

/// Node-local copy of the fields in a scalar type that may carry one derivative direction.
template <class S>
struct LocalData {
  int n = 0, m = 0;
  std::vector<S> F, wt, wb, al, T, xi;
  S pi{};

  S& frame(int k, int i) { return F[k * n + i]; }
  const S& frame(int k, int i) const { return F[k * n + i]; }
  const S& omega_t(int k, int i, int j) const { return wt[(k * n + i) * n + j]; }
  const S& omega_b(int k, int u, int v) const { return wb[(k * m + u) * m + v]; }
  const S& alpha(int u, int i, int j) const { return al[(u * n + i) * n + j]; }
};

LocalData<double> local_values(const GeometricData& data, std::size_t node);

/// Values at `node` with dual parts holding d/dx_k, from stored derivative fields
/// or second-order stencils (centered inside, one-sided at the boundary).
LocalData<Dual<double>> local_jet(const GeometricData& data, std::size_t node, int k,
                                  DerivativeMode mode = DerivativeMode::prefer_analytic);

/// Second-order finite difference along axis k of a per-node array with `width` entries per node.
std::vector<double> grid_derivative(const ChartGrid& grid, const std::vector<double>& values, int width,
                                    std::size_t node, int k);

/// Inverse of a small square matrix stored row-major; partial pivoting on primal values.
template <class S>
std::vector<S> small_inverse(std::vector<S> a, int n) {
  std::vector<S> inv(static_cast<std::size_t>(n * n), S(0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = S(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(primal(a[r * n + col])) > std::abs(primal(a[piv * n + col]))) piv = r;
    if (std::abs(primal(a[piv * n + col])) < 1e-300) throw std::runtime_error("singular frame matrix");
    if (piv != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a[piv * n + c], a[col * n + c]);
        std::swap(inv[piv * n + c], inv[col * n + c]);
      }
    }
    S d = S(1.0) / a[col * n + col];
    for (int c = 0; c < n; ++c) {
      a[col * n + c] = a[col * n + c] * d;
      inv[col * n + c] = inv[col * n + c] * d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = a[r * n + col];
      for (int c = 0; c < n; ++c) {
        a[r * n + c] = a[r * n + c] - f * a[col * n + c];
        inv[r * n + c] = inv[r * n + c] - f * inv[col * n + c];
      }
    }
  }
  return inv;
}

/// Coframe: coframe[i * n + k] = omega_i(d_k), the dual basis of the frame.
template <class S>
std::vector<S> coframe(const LocalData<S>& L) {
  std::vector<S> Fm(static_cast<std::size_t>(L.n * L.n));
  for (int k = 0; k < L.n; ++k)
    for (int i = 0; i < L.n; ++i) Fm[k * L.n + i] = L.frame(k, i);
  return small_inverse<S>(Fm, L.n);  // (F^{-1})[i][k]
}

/// T_0..T_{N+1}: T_0 = 0, T_i = eps_i T^i, T_u = eps_u xi^u.
template <class S>
std::vector<S> delta_components(const SignatureSpec& spec, const LocalData<S>& L) {
  std::vector<S> out(static_cast<std::size_t>(spec.N + 2), S(0.0));
  for (int i = 0; i < L.n; ++i) out[1 + i] = double(spec.sign(1 + i)) * L.T[i];
  for (int u = 0; u < L.m; ++u) out[1 + L.n + u] = double(spec.sign(1 + L.n + u)) * L.xi[u];
  return out;
}

std::vector<double> delta_components(const GeometricData& data, std::size_t node);

/// A_eta in the frame: column i holds the frame components of A_eta(e_i).
Eigen::MatrixXd shape_operator(const GeometricData& data, std::size_t node, const Eigen::VectorXd& eta);

/// S X = -1/(a c) (X - eps <X, T+xi> (T+xi)) for a tangent X given in frame components.
FVector s_tensor(const GeometricData& data, std::size_t node, const Eigen::VectorXd& X);

/// <s1, s2> on F.
double f_inner(const SignatureSpec& spec, const FVector& s1, const FVector& s2);

/// nabla^F_{d_k} of a section sampled at every node.
FVector whitney_derivative(const GeometricData& data, std::size_t node, int k,
                           const std::vector<FVector>& section);

}  // namespace warpframe
