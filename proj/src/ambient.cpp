#include "warpframe/ambient.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace warpframe {

Eigen::MatrixXd SignatureSpec::gram() const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N + 2, N + 2);
  for (int a = 0; a < N + 2; ++a) G(a, a) = sign(a);
  return G;
}

Eigen::VectorXd SignatureSpec::fiber_signs() const {
  Eigen::VectorXd s(N + 1);
  for (int a = 0; a <= N; ++a) s(a) = sign(a);
  return s;
}

ValidationReport validate_signature(const SignatureSpec& spec) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };

  if (spec.n < 1) fail("n must be at least 1");
  if (spec.m < 1) fail("m must be at least 1");
  if (spec.N != spec.n + spec.m - 1) fail("N != n + m - 1");
  if (spec.epsilon != 1 && spec.epsilon != -1) fail("epsilon must be +1 or -1");
  if (spec.c != 1 && spec.c != -1) fail("c must be +1 or -1");
  if (static_cast<int>(spec.signs.size()) != spec.N + 2) {
    fail("signs must have N+2 entries");
    return report;
  }
  for (int s : spec.signs) {
    if (s != 1 && s != -1) {
      fail("every sign must be +1 or -1");
      return report;
    }
  }
  if (spec.signs.front() != spec.c) fail("eps_0 != c");
  if (spec.signs.back() != spec.epsilon) fail("eps_{N+1} != epsilon");

  auto negatives = [&](int from, int to) {
    int k = 0;
    for (int a = from; a <= to && a < static_cast<int>(spec.signs.size()); ++a) k += spec.signs[a] < 0;
    return k;
  };
  if (negatives(1, spec.n) != spec.p) fail("count of -1 among eps_1..eps_n != p");
  if (negatives(spec.n + 1, spec.n + spec.m) != spec.q) fail("count of -1 among eps_{n+1}..eps_{n+m} != q");
  int shift = spec.c == -1 ? 1 : 0;
  if (negatives(0, spec.N) != spec.lambda + shift) {
    std::ostringstream os;
    os << "fiber index mismatch: count of -1 among eps_0..eps_N is " << negatives(0, spec.N)
       << ", expected lambda + |c-1|/2 = " << spec.lambda + shift;
    fail(os.str());
  }
  if (spec.p + spec.q != spec.lambda && report.ok()) {
    std::ostringstream os;
    os << "lambda = " << spec.lambda << " while p+q = " << spec.p + spec.q
       << "; the sign counts are authoritative (a timelike dt uses one negative frame sign)";
    report.notes.push_back(os.str());
  }
  return report;
}

std::string to_string(WarpKind kind) {
  switch (kind) {
    case WarpKind::constant: return "constant";
    case WarpKind::cosh: return "cosh";
    case WarpKind::cos: return "cos";
    case WarpKind::exp: return "exp";
    case WarpKind::tabulated: return "tabulated";
  }
  return "unknown";
}

WarpKind warp_kind_from_string(const std::string& name) {
  if (name == "constant") return WarpKind::constant;
  if (name == "cosh") return WarpKind::cosh;
  if (name == "cos") return WarpKind::cos;
  if (name == "exp") return WarpKind::exp;
  if (name == "tabulated") return WarpKind::tabulated;
  throw std::invalid_argument("unknown warping kind '" + name + "'");
}

WarpingFunction WarpingFunction::constant(double value) {
  WarpingFunction w;
  w.kind = WarpKind::constant;
  w.scale = value;
  return w;
}

WarpingFunction WarpingFunction::analytic(WarpKind kind, double scale, double shift, double rate) {
  WarpingFunction w;
  w.kind = kind;
  w.scale = scale;
  w.shift = shift;
  w.rate = rate;
  if (kind == WarpKind::cos) {
    // keep the argument inside (-pi/2, pi/2)
    double half = 0.5 * std::numbers::pi / std::abs(rate) * (1.0 - 1e-9);
    w.lo = shift - half;
    w.hi = shift + half;
  }
  return w;
}

WarpingFunction WarpingFunction::tabulated(std::vector<double> t, std::vector<double> a) {
  WarpingFunction w;
  w.kind = WarpKind::tabulated;
  w.table_t = std::move(t);
  w.table_a = std::move(a);
  if (!w.table_t.empty()) {
    w.lo = w.table_t.front();
    w.hi = w.table_t.back();
  }
  w.validate();
  return w;
}

bool WarpingFunction::in_domain(double t) const {
  if (!std::isfinite(t)) return false;
  if (lo && t < *lo) return false;
  if (hi && t > *hi) return false;
  return true;
}

void WarpingFunction::validate() const {
  if (kind == WarpKind::tabulated) {
    if (table_t.size() < 3 || table_t.size() != table_a.size())
      throw std::invalid_argument("tabulated warping needs >= 3 matching (t, a) samples");
    double dt = table_t[1] - table_t[0];
    if (!(dt > 0.0)) throw std::invalid_argument("tabulated warping: t must increase");
    for (std::size_t i = 1; i < table_t.size(); ++i) {
      if (std::abs((table_t[i] - table_t[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
        throw std::invalid_argument("tabulated warping: t samples must be uniformly spaced");
    }
    for (double a : table_a)
      if (!(a > 0.0)) throw std::invalid_argument("tabulated warping: a must be positive");
    build_cache();
    return;
  }
  if (!(scale > 0.0)) throw std::invalid_argument("warping scale must be positive");
  if (kind == WarpKind::cos) {
    double half = 0.5 * std::numbers::pi / std::abs(rate);
    if (!lo || !hi || *lo <= shift - half || *hi >= shift + half)
      throw std::invalid_argument("cos warping: domain must stay where cos > 0");
  }
  if (lo && hi && !(*lo < *hi)) throw std::invalid_argument("warping domain is empty");
}

void WarpingFunction::build_cache() const {
  const std::size_t K = table_t.size();
  const double h = table_t[1] - table_t[0];
  fd_cache_.assign(3 * K, 0.0);
  const auto& f = table_a;
  for (std::size_t i = 0; i < K; ++i) {
    double d1, d2;
    if (i == 0) {
      d1 = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
      d2 = K >= 4 ? (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h) : (f[0] - 2 * f[1] + f[2]) / (h * h);
    } else if (i == K - 1) {
      d1 = (3 * f[i] - 4 * f[i - 1] + f[i - 2]) / (2 * h);
      d2 = K >= 4 ? (2 * f[i] - 5 * f[i - 1] + 4 * f[i - 2] - f[i - 3]) / (h * h)
                  : (f[i] - 2 * f[i - 1] + f[i - 2]) / (h * h);
    } else {
      d1 = (f[i + 1] - f[i - 1]) / (2 * h);
      d2 = (f[i + 1] - 2 * f[i] + f[i - 1]) / (h * h);
    }
    fd_cache_[3 * i] = f[i];
    fd_cache_[3 * i + 1] = d1;
    fd_cache_[3 * i + 2] = d2;
  }
}

double WarpingFunction::derivative(double t, int order) const {
  if (!in_domain(t)) {
    std::ostringstream os;
    os << "t = " << t << " outside the warping domain";
    throw std::domain_error(os.str());
  }
  if (order < 0) throw std::invalid_argument("negative derivative order");
  const double x = rate * (t - shift);
  const double rk = std::pow(rate, order);
  switch (kind) {
    case WarpKind::constant:
      return order == 0 ? scale : 0.0;
    case WarpKind::cosh:
      return scale * rk * (order % 2 == 0 ? std::cosh(x) : std::sinh(x));
    case WarpKind::cos: {
      switch (order % 4) {
        case 0: return scale * rk * std::cos(x);
        case 1: return -scale * rk * std::sin(x);
        case 2: return -scale * rk * std::cos(x);
        default: return scale * rk * std::sin(x);
      }
    }
    case WarpKind::exp:
      return scale * rk * std::exp(x);
    case WarpKind::tabulated: {
      if (fd_cache_.empty()) build_cache();
      if (order > 3) throw std::invalid_argument("tabulated warping supports derivatives up to order 3");
      const double h = table_t[1] - table_t[0];
      const std::size_t K = table_t.size();
      double s = (t - table_t[0]) / h;
      auto i = static_cast<std::size_t>(std::floor(s));
      if (i >= K - 1) i = K - 2;
      double w = s - static_cast<double>(i);
      if (order == 3) return (fd_cache_[3 * (i + 1) + 2] - fd_cache_[3 * i + 2]) / h;
      return (1.0 - w) * fd_cache_[3 * i + order] + w * fd_cache_[3 * (i + 1) + order];
    }
  }
  return 0.0;
}

WarpValue warp_eval(const WarpingFunction& w, double t) {
  return {w.derivative(t, 0), w.derivative(t, 1), w.derivative(t, 2)};
}

AmbientVector AmbientVector::dt(const AmbientPoint& base) {
  AmbientVector v;
  v.t_component = 1.0;
  v.fiber = Eigen::VectorXd::Zero(base.p.size());
  v.base = base;
  return v;
}

AmbientVector AmbientVector::fiber_vector(const AmbientPoint& base, Eigen::VectorXd f) {
  AmbientVector v;
  v.fiber = std::move(f);
  v.base = base;
  return v;
}

double flat_inner(const SignatureSpec& spec, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return (spec.fiber_signs().array() * u.array() * v.array()).sum();
}

namespace {

void check_same_base(const AmbientPoint& point, const AmbientVector& v) {
  if (v.base.t != point.t || v.base.p.size() != point.p.size() || (v.base.p - point.p).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("ambient vectors are based at different points");
}

void check_dims(const SignatureSpec& spec, const AmbientVector& v) {
  if (v.fiber.size() != spec.N + 1) throw std::invalid_argument("fiber part must have N+1 components");
}

double dt_pairing(const SignatureSpec& spec, const AmbientVector& v) { return spec.epsilon * v.t_component; }

}  // namespace

double ambient_inner(const SignatureSpec& spec, const WarpingFunction& w, const AmbientPoint& point,
                     const AmbientVector& u, const AmbientVector& v, double tol) {
  check_same_base(point, u);
  check_same_base(point, v);
  check_dims(spec, u);
  check_dims(spec, v);
  const double scale = 1.0 + point.p.norm();
  if (std::abs(flat_inner(spec, point.p, u.fiber)) > tol * scale * (1.0 + u.fiber.norm()) ||
      std::abs(flat_inner(spec, point.p, v.fiber)) > tol * scale * (1.0 + v.fiber.norm()))
    throw std::invalid_argument("fiber component is not tangent to the quadric");
  double a = w.derivative(point.t, 0);
  return spec.epsilon * u.t_component * v.t_component + a * a * flat_inner(spec, u.fiber, v.fiber);
}

AmbientVector warped_connection(const SignatureSpec& spec, const WarpingFunction& w,
                                const AmbientPoint& point, const AmbientVector& V,
                                const AmbientVector& W,
                                const std::optional<Eigen::VectorXd>& w_fiber_derivative) {
  check_same_base(point, V);
  check_same_base(point, W);
  check_dims(spec, V);
  check_dims(spec, W);
  const WarpValue a = warp_eval(w, point.t);
  const double ratio = a.da / a.a;

  AmbientVector out = AmbientVector::fiber_vector(point, Eigen::VectorXd::Zero(spec.N + 1));
  // nabla^P_V W: flat derivative projected onto T_p M^N(c)
  if (w_fiber_derivative) {
    const Eigen::VectorXd& d = *w_fiber_derivative;
    out.fiber += d - spec.c * flat_inner(spec, point.p, d) * point.p;
  }
  // nabla_dt dt = 0, nabla_V dt = nabla_dt V = (a'/a) V, nabla_V W = ... - (eps a'/a)<V,W> dt
  out.fiber += ratio * (V.t_component * W.fiber + W.t_component * V.fiber);
  double vw = a.a * a.a * flat_inner(spec, V.fiber, W.fiber);
  out.t_component = -spec.epsilon * ratio * vw;
  return out;
}

CurvatureCoefficients bar_coefficients(const SignatureSpec& spec, const WarpValue& a) {
  const double eps = spec.epsilon, c = spec.c;
  const double a2 = a.a * a.a;
  return {eps * a.da * a.da / a2 - c / a2, a.dda / a.a - a.da * a.da / a2 + eps * c / a2};
}

CurvatureCoefficients tilde_coefficients(const SignatureSpec& spec, const WarpValue& a,
                                         bool use_a_squared) {
  const double eps = spec.epsilon;
  const double a2 = a.a * a.a;
  return {eps * a.da * a.da / (use_a_squared ? a2 : a.a), a.dda / a.a - a.da * a.da / a2};
}

namespace {

double closed_form(const CurvatureCoefficients& k, double xz, double yw, double yz, double xw, double xt,
                   double yt, double zt, double wt) {
  return k.k1 * (xz * yw - yz * xw) + k.k2 * (xz * yt * wt - yz * xt * wt - xw * yt * zt + yw * xt * zt);
}

double raw_inner(const SignatureSpec& spec, double a, const AmbientVector& u, const AmbientVector& v) {
  return spec.epsilon * u.t_component * v.t_component + a * a * flat_inner(spec, u.fiber, v.fiber);
}

}  // namespace

double curvature_bar(const SignatureSpec& spec, const WarpingFunction& w, const AmbientPoint& point,
                     const AmbientVector& X, const AmbientVector& Y, const AmbientVector& Z,
                     const AmbientVector& W) {
  auto ip = [&](const AmbientVector& u, const AmbientVector& v) { return ambient_inner(spec, w, point, u, v); };
  const auto k = bar_coefficients(spec, warp_eval(w, point.t));
  return closed_form(k, ip(X, Z), ip(Y, W), ip(Y, Z), ip(X, W), dt_pairing(spec, X), dt_pairing(spec, Y),
                     dt_pairing(spec, Z), dt_pairing(spec, W));
}

double curvature_tilde(const SignatureSpec& spec, const WarpingFunction& w,
                       const AmbientPoint& point, const AmbientVector& X, const AmbientVector& Y,
                       const AmbientVector& Z, const AmbientVector& W, bool use_a_squared) {
  for (const auto* v : {&X, &Y, &Z, &W}) {
    check_same_base(point, *v);
    check_dims(spec, *v);
  }
  const WarpValue a = warp_eval(w, point.t);
  auto ip = [&](const AmbientVector& u, const AmbientVector& v) { return raw_inner(spec, a.a, u, v); };
  const auto k = tilde_coefficients(spec, a, use_a_squared);
  return closed_form(k, ip(X, Z), ip(Y, W), ip(Y, Z), ip(X, W), dt_pairing(spec, X), dt_pairing(spec, Y),
                     dt_pairing(spec, Z), dt_pairing(spec, W));
}

double space_form_membership(const SignatureSpec& spec, const Eigen::VectorXd& p) {
  if (p.size() != spec.N + 1) throw std::invalid_argument("point must have N+1 coordinates");
  return std::abs(flat_inner(spec, p, p) - spec.c);
}

}  // namespace warpframe
