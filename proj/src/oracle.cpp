#include "warpframe/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "warpframe/parallel.hpp"

namespace warpframe {

AmbientPoint ExplicitImmersion::point_at(const std::vector<double>& x) const {
  const auto packed = map(x);
  AmbientPoint out;
  out.t = packed[0];
  out.p = Eigen::Map<const Eigen::VectorXd>(packed.data() + 1, static_cast<Eigen::Index>(packed.size() - 1));
  return out;
}

AmbientPoint ExplicitImmersion::point(std::size_t node) const {
  return point_at(grid.coordinates(grid.multi(node)));
}

void ExplicitImmersion::validate() const {
  for (std::size_t v = 0; v < grid.node_count(); ++v) {
    const auto pt = point(v);
    if (pt.p.size() != spec.N + 1) throw std::invalid_argument("immersion map returns the wrong number of coordinates");
    if (space_form_membership(spec, pt.p) > 1e-10) {
      std::ostringstream os;
      os << "node " << v << " is off the quadric by " << space_form_membership(spec, pt.p);
      throw std::invalid_argument(os.str());
    }
    if (!warping.in_domain(pt.t)) {
      std::ostringstream os;
      os << "node " << v << " has t = " << pt.t << " outside the warping domain";
      throw std::invalid_argument(os.str());
    }
  }
}

namespace {

template <class S>
using Vec = std::vector<S>;

template <class S>
struct FrameAt {
  Vec<S> P;
  std::vector<Vec<S>> tau;   // coordinate tangents, packed ambient vectors
  std::vector<Vec<S>> coef;  // e_i = sum_k coef[i][k] tau_k
  std::vector<Vec<S>> e;     // tangent frame
  std::vector<Vec<S>> nu;    // normal frame, by slot
  S a{}, da{};
};

template <class S>
Vec<S> axpy(const S& s, const Vec<S>& x, Vec<S> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
  return y;
}

[[noreturn]] void signature_failure(const std::string& what, double q, int expected) {
  std::ostringstream os;
  os << what << ": squared norm " << q << " where sign " << expected << " is declared";
  throw std::runtime_error(os.str());
}

template <class S>
Vec<S> normal_candidate(const SignatureSpec& spec, const Vec<S>& P, int cand) {
  Vec<S> v(P.size(), S(0.0));
  if (cand == 0) {
    v[0] = S(1.0);
    return v;
  }
  const int b = cand - 1;
  // E_b - c g0(E_b, p) p
  const S coef = double(spec.c * spec.sign(b)) * P[1 + b];
  for (int j = 0; j <= spec.N; ++j) v[1 + j] = -coef * P[1 + j];
  v[1 + b] += S(1.0);
  return v;
}

template <class S>
FrameAt<S> frame_at(const ExplicitImmersion& imm, const NormalPlan& plan, const Vec<S>& x) {
  using DS = Dual<S>;
  const auto& spec = imm.spec;
  const int n = spec.n;
  FrameAt<S> f;
  f.P = imm.map(x);
  for (int k = 0; k < n; ++k) {
    Vec<DS> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[i] = DS(x[i], S(i == k ? 1.0 : 0.0));
    const auto img = imm.map(xs);
    Vec<S> t(img.size());
    for (std::size_t c = 0; c < img.size(); ++c) t[c] = img[c].d;
    f.tau.push_back(t);
  }
  f.a = warp_derivative<S>(imm.warping, f.P[0], 0);
  f.da = warp_derivative<S>(imm.warping, f.P[0], 1);
  auto inner = [&](const Vec<S>& u, const Vec<S>& v) { return warped_inner_packed<S>(spec, f.a, u, v); };

  std::vector<Vec<S>> g(n, Vec<S>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) g[k][l] = inner(f.tau[k], f.tau[l]);
  auto gdot = [&](const Vec<S>& u, const Vec<S>& v) {
    S out(0.0);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) out += u[k] * g[k][l] * v[l];
    return out;
  };
  for (int i = 0; i < n; ++i) {
    Vec<S> v(n, S(0.0));
    v[i] = S(1.0);
    const Vec<S> unit = v;
    for (int j = 0; j < i; ++j) v = axpy<S>(-double(spec.sign(1 + j)) * gdot(unit, f.coef[j]), f.coef[j], v);
    const S q = gdot(v, v);
    const int want = spec.sign(1 + i);
    if (!(primal(q) * want > 1e-12)) signature_failure("induced metric, tangent direction " + std::to_string(i), primal(q), want);
    const S norm = sqrt(q * double(want));
    for (auto& c : v) c = c / norm;
    f.coef.push_back(v);
    Vec<S> e(f.P.size(), S(0.0));
    for (int k = 0; k < n; ++k) e = axpy<S>(v[k], f.tau[k], e);
    f.e.push_back(e);
  }

  f.nu.assign(spec.m, Vec<S>());
  std::vector<int> done;
  for (const auto& [cand, slot] : plan) {
    Vec<S> v = normal_candidate<S>(spec, f.P, cand);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < n; ++i) v = axpy<S>(-double(spec.sign(1 + i)) * inner(v, f.e[i]), f.e[i], v);
      for (int u : done) v = axpy<S>(-double(spec.sign(1 + n + u)) * inner(v, f.nu[u]), f.nu[u], v);
    }
    const S q = inner(v, v);
    const int want = spec.sign(1 + n + slot);
    if (!(primal(q) * want > 1e-12)) signature_failure("normal bundle, slot " + std::to_string(slot), primal(q), want);
    const S norm = sqrt(q * double(want));
    for (auto& c : v) c = c / norm;
    f.nu[slot] = v;
    done.push_back(slot);
  }
  return f;
}

template <class S>
struct FieldValues {
  Vec<S> frame, wt, wb, al, T, xi;
  S pi{};
};

template <class S>
FieldValues<S> fields_at(const ExplicitImmersion& imm, const NormalPlan& plan, const Vec<S>& x) {
  using DS = Dual<S>;
  const auto& spec = imm.spec;
  const int n = spec.n, m = spec.m;
  const auto f = frame_at<S>(imm, plan, x);
  std::vector<std::vector<Vec<S>>> de(n), dnu(n);  // [k][j]
  for (int k = 0; k < n; ++k) {
    Vec<DS> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[i] = DS(x[i], S(i == k ? 1.0 : 0.0));
    const auto fk = frame_at<DS>(imm, plan, xs);
    auto strip = [](const Vec<DS>& v) {
      Vec<S> out(v.size());
      for (std::size_t c = 0; c < v.size(); ++c) out[c] = v[c].d;
      return out;
    };
    for (int j = 0; j < n; ++j) de[k].push_back(strip(fk.e[j]));
    for (int u = 0; u < m; ++u) dnu[k].push_back(strip(fk.nu[u]));
  }
  auto inner = [&](const Vec<S>& u, const Vec<S>& v) { return warped_inner_packed<S>(spec, f.a, u, v); };
  auto cov = [&](int k, const Vec<S>& v, const Vec<S>& dv) {
    const auto gamma = warped_christoffel_packed<S>(spec, f.a, f.da, f.tau[k], v);
    Vec<S> out(dv.size());
    for (std::size_t c = 0; c < dv.size(); ++c) out[c] = dv[c] + gamma[c];
    return out;
  };

  FieldValues<S> out;
  out.frame.resize(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) out.frame[k * n + i] = f.coef[i][k];
  out.wt.resize(static_cast<std::size_t>(n * n * n));
  out.wb.resize(static_cast<std::size_t>(n * m * m));
  out.al.assign(static_cast<std::size_t>(m * n * n), S(0.0));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      const auto ne = cov(k, f.e[j], de[k][j]);
      for (int i = 0; i < n; ++i) out.wt[(k * n + i) * n + j] = double(spec.sign(1 + i)) * inner(f.e[i], ne);
      for (int u = 0; u < m; ++u) {
        const S p = double(spec.sign(1 + n + u)) * inner(ne, f.nu[u]);
        for (int i = 0; i < n; ++i) out.al[(u * n + i) * n + j] += f.coef[i][k] * p;
      }
    }
    for (int v = 0; v < m; ++v) {
      const auto nn = cov(k, f.nu[v], dnu[k][v]);
      for (int u = 0; u < m; ++u) out.wb[(k * m + u) * m + v] = double(spec.sign(1 + n + u)) * inner(f.nu[u], nn);
    }
  }
  Vec<S> dt(f.P.size(), S(0.0));
  dt[0] = S(1.0);
  for (int i = 0; i < n; ++i) out.T.push_back(double(spec.sign(1 + i)) * inner(dt, f.e[i]));
  for (int u = 0; u < m; ++u) out.xi.push_back(double(spec.sign(1 + n + u)) * inner(dt, f.nu[u]));
  out.pi = f.P[0];
  return out;
}

template <class S>
void store(const FieldValues<S>& v, FieldArrays& dst, std::size_t node, const FieldSizes& s, bool derivative) {
  auto put = [&](const Vec<S>& src, std::vector<double>& target, int width) {
    for (int c = 0; c < width; ++c) {
      if constexpr (std::is_same_v<S, double>) target[node * width + c] = src[c];
      else target[node * width + c] = derivative ? src[c].d : src[c].v;
    }
  };
  put(v.frame, dst.frame, s.frame);
  put(v.wt, dst.omega_tangent, s.omega_tangent);
  put(v.wb, dst.omega_bundle, s.omega_bundle);
  put(v.al, dst.alpha, s.alpha);
  put(v.T, dst.T, s.T);
  put(v.xi, dst.xi, s.xi);
  put(Vec<S>{v.pi}, dst.pi, 1);
}

}  // namespace

NormalPlan plan_normals(const ExplicitImmersion& imm) {
  const auto& spec = imm.spec;
  const int n = spec.n, m = spec.m;
  const auto x = imm.grid.coordinates(imm.grid.base_node);
  const auto f = frame_at<double>(imm, {}, x);
  auto inner = [&](const Vec<double>& u, const Vec<double>& v) { return warped_inner_packed<double>(spec, f.a, u, v); };
  NormalPlan plan;
  std::vector<Vec<double>> chosen(m);
  std::vector<int> done;
  std::set<int> used;
  for (int round = 0; round < m; ++round) {
    int best_cand = -1, best_slot = -1;
    double best_q = 1e-10;
    for (int cand = 0; cand <= spec.N + 1; ++cand) {
      if (used.count(cand)) continue;
      Vec<double> v = normal_candidate<double>(spec, f.P, cand);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < n; ++i) v = axpy<double>(-spec.sign(1 + i) * inner(v, f.e[i]), f.e[i], v);
        for (int u : done) v = axpy<double>(-spec.sign(1 + n + u) * inner(v, chosen[u]), chosen[u], v);
      }
      const double q = inner(v, v);
      int slot = -1;
      for (int u = 0; u < m && slot < 0; ++u)
        if (std::find(done.begin(), done.end(), u) == done.end() && q * spec.sign(1 + n + u) > 0) slot = u;
      if (slot >= 0 && std::abs(q) > best_q) {
        best_q = std::abs(q);
        best_cand = cand;
        best_slot = slot;
      }
    }
    if (best_cand < 0) throw std::runtime_error("normal bundle does not have the declared signature");
    Vec<double> v = normal_candidate<double>(spec, f.P, best_cand);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < n; ++i) v = axpy<double>(-spec.sign(1 + i) * inner(v, f.e[i]), f.e[i], v);
      for (int u : done) v = axpy<double>(-spec.sign(1 + n + u) * inner(v, chosen[u]), chosen[u], v);
    }
    const double norm = std::sqrt(std::abs(inner(v, v)));
    for (auto& c : v) c /= norm;
    chosen[best_slot] = v;
    done.push_back(best_slot);
    used.insert(best_cand);
    plan.emplace_back(best_cand, best_slot);
  }
  return plan;
}

GeometricData induce_data(const ExplicitImmersion& imm, const InduceOptions& options) {
  const auto report = validate_signature(imm.spec);
  if (!report.ok()) throw std::invalid_argument("immersion signature invalid: " + report.violations.front());
  imm.warping.validate();
  imm.grid.validate();
  imm.validate();
  NormalPlan plan;
  try {
    plan = plan_normals(imm);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("base node " + std::to_string(imm.grid.linear(imm.grid.base_node)) + ": " + e.what());
  }
  const int n = imm.spec.n, m = imm.spec.m;
  const std::size_t nodes = imm.grid.node_count();
  const auto sizes = FieldSizes::of(n, m);

  GeometricData data;
  data.spec = imm.spec;
  data.warping = imm.warping;
  data.grid = imm.grid;
  data.source = imm.tag;
  data.fields = FieldArrays::zeros(n, m, nodes);
  if (options.analytic_derivatives) data.derivatives.assign(n, FieldArrays::zeros(n, m, nodes));

  parallel_for(nodes, [&](std::size_t v) {
    const auto x = imm.grid.coordinates(imm.grid.multi(v));
    try {
      store(fields_at<double>(imm, plan, x), data.fields, v, sizes, false);
      if (options.analytic_derivatives) {
        for (int l = 0; l < n; ++l) {
          Vec<D1> xs(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) xs[i] = D1(x[i], i == l ? 1.0 : 0.0);
          store(fields_at<D1>(imm, plan, xs), data.derivatives[l], v, sizes, true);
        }
      }
    } catch (const std::runtime_error& e) {
      std::ostringstream os;
      os << "node " << v << ": " << e.what();
      throw std::runtime_error(os.str());
    }
  });
  return data;
}

// ---------------------------------------------------------------------------
// Example library

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ParamReader {
  Params resolved;

  ParamReader(const Params& defaults, const Params& given, const std::string& family) : resolved(defaults) {
    for (const auto& [k, v] : given) {
      if (!defaults.count(k)) throw std::invalid_argument("unknown parameter '" + k + "' for " + family);
      resolved[k] = v;
    }
  }

  double num(const std::string& key) const {
    const std::string& s = resolved.at(key);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
      throw std::invalid_argument("parameter '" + key + "' is not a number: " + s);
    return v;
  }
  int integer(const std::string& key) const {
    double v = num(key);
    if (v != std::floor(v)) throw std::invalid_argument("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  int sign(const std::string& key) const {
    int v = integer(key);
    if (v != 1 && v != -1) throw std::invalid_argument("parameter '" + key + "' must be +1 or -1");
    return v;
  }
  WarpingFunction warp() const {
    const auto kind = warp_kind_from_string(resolved.at("warp"));
    if (kind == WarpKind::tabulated) throw std::invalid_argument("fixtures use analytic warpings");
    if (kind == WarpKind::constant) return WarpingFunction::constant(num("warp_scale"));
    return WarpingFunction::analytic(kind, num("warp_scale"), num("warp_shift"), num("warp_rate"));
  }
  ChartGrid grid(int n) const {
    const int extent = integer("extent");
    const double h = num("h");
    if (extent < 3 || extent % 2 == 0) throw std::invalid_argument("extent must be odd and at least 3");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    return ChartGrid::uniform(n, extent, h, 0.0);
  }
};

Params with_common(Params p, const std::string& warp, const std::string& extent) {
  p.emplace("warp", warp);
  p.emplace("warp_scale", "1");
  p.emplace("warp_shift", "0");
  p.emplace("warp_rate", "1");
  p.emplace("extent", extent);
  p.emplace("h", "0.05");
  return p;
}

SignatureSpec make_spec(int n, int m, int epsilon, int c, std::vector<int> signs) {
  SignatureSpec s;
  s.n = n;
  s.m = m;
  s.N = n + m - 1;
  s.epsilon = epsilon;
  s.c = c;
  s.signs = std::move(signs);
  s.p = s.q = 0;
  int neg_fiber = 0;
  for (int a = 1; a <= n; ++a) s.p += s.signs[a] < 0;
  for (int a = n + 1; a <= n + m; ++a) s.q += s.signs[a] < 0;
  for (int a = 0; a <= s.N; ++a) neg_fiber += s.signs[a] < 0;
  s.lambda = neg_fiber - (c == -1 ? 1 : 0);
  const auto report = validate_signature(s);
  if (!report.ok()) throw std::invalid_argument("fixture signature invalid: " + report.violations.front());
  return s;
}

// p_0 = sqrt(1 - c sum eps_i x_i^2) so that g0(p, p) = c with eps_0 = c.
template <class S>
S quadric_head(const SignatureSpec& spec, const Vec<S>& x, double scale = 1.0) {
  using std::sqrt;
  S sum(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) sum += double(spec.sign(1 + static_cast<int>(i))) * x[i] * x[i];
  return sqrt(1.0 - double(spec.c) * sum / (scale * scale));
}

ExplicitImmersion finish(const std::string& name, const ParamReader& pr, SignatureSpec spec, int n, ImmersionMap map) {
  ExplicitImmersion imm;
  imm.spec = std::move(spec);
  imm.warping = pr.warp();
  imm.grid = pr.grid(n);
  imm.map = std::move(map);
  imm.tag = Provenance{name, pr.resolved};
  imm.validate();
  return imm;
}

ExplicitImmersion slice_like(const std::string& name, const Params& defaults, const Params& given) {
  const ParamReader pr(defaults, given, name);
  const int n = pr.integer("n");
  const int index = pr.integer("p");
  const int eps = pr.sign("epsilon"), c = pr.sign("c");
  if (n < 1 || index < 0 || index > n) throw std::invalid_argument("slice needs n >= 1 and 0 <= p <= n");
  std::vector<int> signs = {c};
  for (int i = 0; i < n; ++i) signs.push_back(i < n - index ? 1 : -1);
  signs.push_back(eps);
  const auto spec = make_spec(n, 1, eps, c, signs);
  const double t0 = pr.num("t0"), tilt = pr.num("tilt");
  auto fn = [spec, t0, tilt](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    Vec<S> out;
    out.push_back(t0 + tilt * x[0]);
    out.push_back(quadric_head<S>(spec, x));
    for (const auto& xi : x) out.push_back(xi);
    return out;
  };
  return finish(name, pr, spec, n, ImmersionMap::from(fn));
}

ExplicitImmersion vertical_geodesic(const Params& given) {
  const Params defaults = with_common({{"epsilon", "1"}, {"c", "1"}, {"s0", "0.5"}}, "cosh", "17");
  const ParamReader pr(defaults, given, "vertical_geodesic");
  const int eps = pr.sign("epsilon"), c = pr.sign("c");
  const auto spec = make_spec(1, 1, eps, c, {c, eps, eps});
  const double s0 = pr.num("s0");
  auto fn = [s0](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    return Vec<S>{x[0] + s0, S(1.0), S(0.0)};
  };
  return finish("vertical_geodesic", pr, spec, 1, ImmersionMap::from(fn));
}

ExplicitImmersion great_subsphere(const Params& given) {
  const Params defaults =
      with_common({{"n", "2"}, {"N", "3"}, {"r", "1"}, {"t0", "0.5"}, {"epsilon", "1"}, {"c", "1"}}, "constant", "17");
  const ParamReader pr(defaults, given, "great_subsphere");
  const int n = pr.integer("n"), N = pr.integer("N");
  const int eps = pr.sign("epsilon"), c = pr.sign("c");
  if (n < 1 || N <= n) throw std::invalid_argument("great_subsphere needs 1 <= n < N");
  const int m = N - n + 1;
  std::vector<int> signs(static_cast<std::size_t>(N + 2), 1);
  signs.front() = c;
  signs.back() = eps;
  const auto spec = make_spec(n, m, eps, c, signs);
  const double r = pr.num("r"), t0 = pr.num("t0");
  const double rad = c * spec.sign(n + 1) * (1.0 - r * r);
  if (!(r > 0.0) || rad < 0.0) throw std::invalid_argument("great_subsphere radius r must keep the point on the quadric");
  const double s = std::sqrt(rad);
  auto fn = [spec, r, s, t0, N, n](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    Vec<S> out(static_cast<std::size_t>(N + 2), S(0.0));
    out[0] = S(t0);
    out[1] = r * quadric_head<S>(spec, x, r);
    for (int i = 0; i < n; ++i) out[2 + i] = x[i];
    out[2 + n] = S(s);
    return out;
  };
  return finish("great_subsphere", pr, spec, n, ImmersionMap::from(fn));
}

ExplicitImmersion helix(const Params& given) {
  const Params defaults = with_common(
      {{"n", "1"}, {"beta", "0.5"}, {"omega", "1"}, {"theta0", "1.2"}, {"epsilon", "1"}}, "cosh", "33");
  const ParamReader pr(defaults, given, "helix");
  const int n = pr.integer("n");
  const int eps = pr.sign("epsilon");
  if (n != 1 && n != 2) throw std::invalid_argument("helix has n = 1 (curve) or n = 2 (strip)");
  const int m = 3 - n;
  const auto spec = make_spec(n, m, eps, 1, {1, 1, 1, eps});
  const double beta = pr.num("beta"), omega = pr.num("omega"), theta0 = pr.num("theta0");
  {
    const ChartGrid g = pr.grid(n);
    const double reach = n == 2 ? g.spacing[1] * (g.extents[1] - 1) / 2.0 : 0.0;
    if (std::min(std::sin(theta0 - reach), std::sin(theta0 + reach)) < 0.05)
      throw std::invalid_argument("helix colatitude range must stay away from the poles");
  }
  auto fn = [beta, omega, theta0, n](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    using std::cos;
    using std::sin;
    const S th = n == 2 ? theta0 + x[1] : S(theta0);
    const S phi = omega * x[0];
    return Vec<S>{beta * x[0], cos(th), sin(th) * cos(phi), sin(th) * sin(phi)};
  };
  return finish("helix", pr, spec, n, ImmersionMap::from(fn));
}

ExplicitImmersion lorentz_cylinder(const Params& given) {
  const Params defaults = with_common({{"B", "0.6"}, {"kappa", "0.3"}, {"t0", "0.2"}}, "cosh", "17");
  const ParamReader pr(defaults, given, "lorentz_cylinder");
  const auto spec = make_spec(2, 1, 1, 1, {1, 1, -1, 1});
  const double B = pr.num("B"), kappa = pr.num("kappa"), t0 = pr.num("t0");
  if (!(B > 0.0 && B < 1.0)) throw std::invalid_argument("lorentz_cylinder needs 0 < B < 1");
  const double head = std::sqrt(1.0 - B * B);
  auto fn = [B, kappa, t0, head](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    using std::cosh;
    using std::sinh;
    const S v = x[1] + kappa * x[0];
    return Vec<S>{t0 + x[0], S(head), B * cosh(v), B * sinh(v)};
  };
  return finish("lorentz_cylinder", pr, spec, 2, ImmersionMap::from(fn));
}

}  // namespace

std::vector<std::string> example_names() {
  return {"slice", "vertical_geodesic", "great_subsphere", "helix", "desitter_slice", "lorentz_cylinder"};
}

ExplicitImmersion example_immersion(const std::string& name, const Params& params) {
  if (name == "slice")
    return slice_like(name,
                      with_common({{"n", "2"}, {"p", "0"}, {"t0", "0.5"}, {"tilt", "0"}, {"epsilon", "1"}, {"c", "1"}},
                                  "cosh", "17"),
                      params);
  if (name == "desitter_slice")
    return slice_like(name,
                      with_common({{"n", "2"}, {"p", "0"}, {"t0", "0.3"}, {"tilt", "0"}, {"epsilon", "-1"}, {"c", "1"}},
                                  "cosh", "17"),
                      params);
  if (name == "vertical_geodesic") return vertical_geodesic(params);
  if (name == "great_subsphere") return great_subsphere(params);
  if (name == "helix") return helix(params);
  if (name == "lorentz_cylinder") return lorentz_cylinder(params);
  throw std::invalid_argument("unknown example '" + name + "'");
}

Example canonical_example(const std::string& name, const Params& params, const InduceOptions& options) {
  Example ex;
  ex.immersion = example_immersion(name, params);
  ex.data = induce_data(ex.immersion, options);
  return ex;
}

GeometricData refine_example(const GeometricData& data, int factor) {
  if (!data.source) throw std::invalid_argument("refinement needs the oracle provenance block ('source')");
  if (factor != 1 && factor != 2 && factor != 4) throw std::invalid_argument("refinement factor must be 1, 2 or 4");
  Params p = data.source->params;
  const int extent = std::stoi(p.at("extent"));
  const double h = std::stod(p.at("h"));
  p["extent"] = std::to_string((extent - 1) * factor + 1);
  p["h"] = format_double(h / factor);
  return canonical_example(data.source->family, p, {data.has_derivatives()}).data;
}

}  // namespace warpframe
