#pragma once

// Connection-form matrices at one node, generic in the scalar so that the same
// assembly yields values (double) and directional derivatives (Dual<double>).
// Index ranges: 0 | 1..n tangent | n+1..N+1 bundle. Covectors are stored by
// their coordinate components.

#include <vector>

#include "warpframe/ambient.hpp"
#include "warpframe/bundle_data.hpp"

namespace warpframe {

template <class S>
struct FormsAt {
  int n = 0;
  int size = 0;              // N + 2
  std::vector<S> Omega;      // [(alpha * size + beta) * n + k]
  std::vector<S> X;          // same layout
  std::vector<S> Upsilon;    // Omega - X
  std::vector<S> W;          // omega_alpha(d_k) at [alpha * n + k]
  std::vector<S> delta;      // delta(d_k)
  std::vector<S> Tc;         // T_0 .. T_{N+1}
  S a{}, da{}, dda{};

  S& omega(int al, int be, int k) { return Omega[(al * size + be) * n + k]; }
  const S& omega(int al, int be, int k) const { return Omega[(al * size + be) * n + k]; }
  const S& x(int al, int be, int k) const { return X[(al * size + be) * n + k]; }
  const S& ups(int al, int be, int k) const { return Upsilon[(al * size + be) * n + k]; }
  const S& w(int al, int k) const { return W[al * n + k]; }
};

template <class S>
FormsAt<S> assemble_local(const SignatureSpec& spec, const WarpingFunction& warp, const LocalData<S>& L) {
  const int n = L.n, m = L.m, s = spec.N + 2;
  FormsAt<S> f;
  f.n = n;
  f.size = s;
  f.a = warp_derivative<S>(warp, L.pi, 0);
  f.da = warp_derivative<S>(warp, L.pi, 1);
  f.dda = warp_derivative<S>(warp, L.pi, 2);
  f.Omega.assign(static_cast<std::size_t>(s * s * n), S(0.0));
  f.X.assign(f.Omega.size(), S(0.0));
  f.W.assign(static_cast<std::size_t>(s * n), S(0.0));
  f.delta.assign(static_cast<std::size_t>(n), S(0.0));
  f.Tc = delta_components(spec, L);

  const auto co = coframe(L);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) f.W[(1 + i) * n + k] = co[i * n + k];
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) f.delta[k] += f.Tc[1 + i] * co[i * n + k];

  const double eps = spec.epsilon;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.omega(1 + i, 1 + j, k) = L.omega_t(k, i, j);
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v) f.omega(1 + n + u, 1 + n + v, k) = L.omega_b(k, u, v);
    for (int u = 0; u < m; ++u)
      for (int i = 0; i < n; ++i) {
        S val(0.0);  // alpha^u(d_k, e_i)
        for (int j = 0; j < n; ++j) val += co[j * n + k] * L.alpha(u, j, i);
        f.omega(1 + n + u, 1 + i, k) = val;
        f.omega(1 + i, 1 + n + u, k) = -double(spec.sign(1 + i) * spec.sign(1 + n + u)) * val;
      }
    // omega_{alpha 0}(X) = -eps_alpha <e_alpha, S X>
    for (int al = 1; al < s; ++al) {
      S val = (f.w(al, k) - eps * spec.sign(al) * f.Tc[al] * f.delta[k]) / (f.a * double(spec.c));
      f.omega(al, 0, k) = val;
      f.omega(0, al, k) = -double(spec.c * spec.sign(al)) * val;
    }
  }

  const S coef = eps * f.da / f.a;
  for (int al = 0; al < s; ++al)
    for (int be = 0; be < s; ++be)
      for (int k = 0; k < n; ++k)
        f.X[(al * s + be) * n + k] =
            coef * (f.Tc[be] * f.w(al, k) - double(spec.sign(al) * spec.sign(be)) * f.Tc[al] * f.w(be, k));

  f.Upsilon.resize(f.Omega.size());
  for (std::size_t e = 0; e < f.Omega.size(); ++e) f.Upsilon[e] = f.Omega[e] - f.X[e];
  return f;
}

}  // namespace warpframe
