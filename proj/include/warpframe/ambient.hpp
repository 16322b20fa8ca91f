#pragma once

// Geometry of the warped product eps*I x_a M^N_lambda(c) and of the flat-fiber
// warped product eps*I x_a E^{N+1}_lambda that contains it.
//
// Ambient points are (t, p) with p in E^{N+1}. The flat fiber metric is
// g0 = diag(signs[0..N]) in the coordinate basis E_0..E_N, and the warped metric
// is eps*dt^2 + a(t)^2 g0.

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "warpframe/dual.hpp"

namespace warpframe {

struct SignatureSpec {
  int n = 1;       // tangent dimension
  int m = 1;       // bundle rank
  int N = 1;       // fiber dimension, n + m - 1
  int p = 0;       // index of M
  int q = 0;       // index of E
  int lambda = 0;  // index of the fiber space form
  int epsilon = 1;
  int c = 1;
  std::vector<int> signs;  // eps_0 .. eps_{N+1}

  int sign(int alpha) const { return signs.at(static_cast<std::size_t>(alpha)); }
  int size() const { return N + 2; }
  /// G = diag(eps_0 .. eps_{N+1}).
  Eigen::MatrixXd gram() const;
  /// g0 = diag(eps_0 .. eps_N), the flat metric on E^{N+1}.
  Eigen::VectorXd fiber_signs() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;
  bool ok() const { return violations.empty(); }
};

/// Empty violation list iff every sign convention holds. `notes` carries the
/// p+q+|c-1|/2 comparison, which is informational only.
ValidationReport validate_signature(const SignatureSpec& spec);

enum class WarpKind { constant, cosh, cos, exp, tabulated };

std::string to_string(WarpKind kind);
WarpKind warp_kind_from_string(const std::string& name);

/// a(t) = scale * k(rate * (t - shift)) for the analytic kinds, where k is
/// 1, cosh, cos or exp. The tabulated kind samples a on a uniform grid.
struct WarpingFunction {
  WarpKind kind = WarpKind::constant;
  double scale = 1.0;
  double shift = 0.0;
  double rate = 1.0;
  std::optional<double> lo;  // domain I, unbounded when empty
  std::optional<double> hi;
  std::vector<double> table_t;
  std::vector<double> table_a;

  static WarpingFunction constant(double value);
  static WarpingFunction analytic(WarpKind kind, double scale = 1.0, double shift = 0.0,
                                  double rate = 1.0);
  static WarpingFunction tabulated(std::vector<double> t, std::vector<double> a);

  bool in_domain(double t) const;
  /// k-th derivative of a at t. Throws std::domain_error outside I.
  double derivative(double t, int order) const;
  /// Throws std::invalid_argument when a is not positive on I or the table is malformed.
  void validate() const;

 private:
  mutable std::vector<double> fd_cache_;  // a, a', a'' per table sample
  void build_cache() const;
};

struct WarpValue {
  double a = 0.0;
  double da = 0.0;
  double dda = 0.0;
};

WarpValue warp_eval(const WarpingFunction& w, double t);

/// a^{(order)}(t) for a scalar that may carry dual parts.
template <class S>
S warp_derivative(const WarpingFunction& w, const S& t, int order) {
  if constexpr (std::is_same_v<S, double>) {
    return w.derivative(t, order);
  } else {
    using Inner = decltype(S{}.v);
    S out;
    out.v = warp_derivative<Inner>(w, t.v, order);
    out.d = warp_derivative<Inner>(w, t.v, order + 1) * t.d;
    return out;
  }
}

struct AmbientPoint {
  double t = 0.0;
  Eigen::VectorXd p;  // N+1 coordinates in E^{N+1}
};

/// Tangent vector of the flat-fiber warped product at `base`.
struct AmbientVector {
  double t_component = 0.0;
  Eigen::VectorXd fiber;  // N+1 components
  AmbientPoint base;

  static AmbientVector dt(const AmbientPoint& base);
  static AmbientVector fiber_vector(const AmbientPoint& base, Eigen::VectorXd v);
};

/// Flat metric g0 restricted to the fiber coordinates.
double flat_inner(const SignatureSpec& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// eps*u_t*v_t + a(t)^2 g0(u_fib, v_fib). Throws std::invalid_argument on
/// base-point mismatch or fiber parts not tangent to the quadric.
double ambient_inner(const SignatureSpec& spec, const WarpingFunction& w, const AmbientPoint& point,
                     const AmbientVector& u, const AmbientVector& v, double tol = 1e-8);

/// Levi-Civita connection of eps*I x_a M^N(c). W is extended by projecting its
/// fiber part onto the quadric tangent spaces; `w_fiber_derivative` is the flat
/// derivative of that extension along V (zero for a projected constant vector).
AmbientVector warped_connection(const SignatureSpec& spec, const WarpingFunction& w,
                                const AmbientPoint& point, const AmbientVector& V,
                                const AmbientVector& W,
                                const std::optional<Eigen::VectorXd>& w_fiber_derivative = {});

/// Coefficients of the closed-form curvature tensors.
struct CurvatureCoefficients {
  double k1 = 0.0;  // multiplies <X,Z><Y,W> - <Y,Z><X,W>
  double k2 = 0.0;  // multiplies the dt-terms
};

CurvatureCoefficients bar_coefficients(const SignatureSpec& spec, const WarpValue& a);
/// As printed the first coefficient is eps*a'^2/a; `use_a_squared` switches it to eps*a'^2/a^2.
CurvatureCoefficients tilde_coefficients(const SignatureSpec& spec, const WarpValue& a,
                                         bool use_a_squared = false);

/// R(X,Y,Z,W) of eps*I x_a M^N(c).
double curvature_bar(const SignatureSpec& spec, const WarpingFunction& w, const AmbientPoint& point,
                     const AmbientVector& X, const AmbientVector& Y, const AmbientVector& Z,
                     const AmbientVector& W);

/// R(X,Y,Z,W) of eps*I x_a E^{N+1}; vectors need not be tangent to the quadric.
double curvature_tilde(const SignatureSpec& spec, const WarpingFunction& w,
                       const AmbientPoint& point, const AmbientVector& X, const AmbientVector& Y,
                       const AmbientVector& Z, const AmbientVector& W, bool use_a_squared = false);

/// |g0(p,p) - c|.
double space_form_membership(const SignatureSpec& spec, const Eigen::VectorXd& p);

// Scalar-generic helpers used by the oracle, where derivatives are carried
// through dual numbers. Vectors are (t, y_0..y_N) packed in one std::vector.

template <class S>
S warped_inner_packed(const SignatureSpec& spec, const S& a, const std::vector<S>& u,
                      const std::vector<S>& v) {
  S fiber(0.0);
  for (int b = 0; b <= spec.N; ++b) fiber += double(spec.sign(b)) * u[b + 1] * v[b + 1];
  return double(spec.epsilon) * u[0] * v[0] + a * a * fiber;
}

/// Christoffel term of eps*I x_a E^{N+1}: nabla_U V = dV(U) + gamma(U, V).
template <class S>
std::vector<S> warped_christoffel_packed(const SignatureSpec& spec, const S& a, const S& da,
                                         const std::vector<S>& u, const std::vector<S>& v) {
  std::vector<S> out(u.size(), S(0.0));
  S g0(0.0);
  for (int b = 0; b <= spec.N; ++b) g0 += double(spec.sign(b)) * u[b + 1] * v[b + 1];
  out[0] = -double(spec.epsilon) * a * da * g0;
  S ratio = da / a;
  for (int b = 0; b <= spec.N; ++b) out[b + 1] = ratio * (u[0] * v[b + 1] + v[0] * u[b + 1]);
  return out;
}

}  // namespace warpframe
