#include "warpframe/verifier.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "warpframe/forms.hpp"
#include "warpframe/parallel.hpp"

namespace warpframe {

namespace {

using D = Dual<double>;

const std::vector<std::string> kStructure = {"A", "B", "C", "D", "E", "F"};
const std::vector<std::string> kAux = {"aux1", "aux2", "aux3", "aux4"};
const std::vector<std::string> kFlat = {"flatness", "flat_dX", "flat_XX", "flat_OX", "flat_dOmega"};

std::vector<std::pair<int, int>> planes(int n) {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) out.emplace_back(k, l);
  return out;
}

// Everything one node needs: values, coordinate derivatives of every field and form.
struct NodeContext {
  const SignatureSpec& spec;
  int n, m, s;
  LocalData<double> L;
  FormsAt<double> f;
  std::vector<LocalData<D>> J;  // J[l]: dual part holds d/dx_l
  std::vector<FormsAt<D>> fj;
  std::vector<double> co;

  NodeContext(const GeometricData& data, std::size_t node, DerivativeMode mode)
      : spec(data.spec), n(data.n()), m(data.m()), s(data.spec.N + 2), L(local_values(data, node)) {
    f = assemble_local(spec, data.warping, L);
    co = coframe(L);
    for (int l = 0; l < n; ++l) {
      J.push_back(local_jet(data, node, l, mode));
      fj.push_back(assemble_local(spec, data.warping, J.back()));
    }
  }

  double eps(int al) const { return spec.sign(al); }
  double F(int k, int a) const { return L.frame(k, a); }
  // Frame evaluation of a coordinate 2-form given by tw(k, l).
  template <class Fn>
  double frame2(int a, int b, Fn tw) const {
    double out = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        if (k != l) out += F(k, a) * F(l, b) * tw(k, l);
    return out;
  }
};

void put_antisymmetric(std::vector<double>& out, std::size_t ab, std::size_t ba, double v) {
  out[ab] = v;
  out[ba] = -v;
}

}  // namespace

std::map<std::string, std::vector<double>> node_residuals(const GeometricData& data, std::size_t node,
                                                          DerivativeMode mode) {
  const NodeContext C(data, node, mode);
  const auto& spec = data.spec;
  const auto& L = C.L;
  const auto& f = C.f;
  const int n = C.n, m = C.m, s = C.s;
  const double eps = spec.epsilon, c = spec.c;
  const double a = f.a, da = f.da, dda = f.dda;
  const double k1 = eps * da * da / (a * a) - c / (a * a);
  const double k2 = dda / a - da * da / (a * a) + eps * c / (a * a);
  const double k0 = dda / a - (da / a) * (da / a);
  const double r = eps * da / a;
  const double q2 = (da / a) * (da / a);
  auto g = [&](int x, int y) { return x == y ? C.eps(1 + x) : 0.0; };
  auto t = [&](int x) { return f.Tc[1 + x]; };
  auto eps_t = [&](int i) { return C.eps(1 + i); };
  auto eps_b = [&](int u) { return C.eps(1 + n + u); };

  std::map<std::string, std::vector<double>> out;

  // (A)
  {
    double v = -eps;
    for (int i = 0; i < n; ++i) v += eps_t(i) * L.T[i] * L.T[i];
    for (int u = 0; u < m; ++u) v += eps_b(u) * L.xi[u] * L.xi[u];
    out["A"] = {v};
  }

  // (B): nabla_X T - (a'/a)(X - eps <X,T> T) - A_xi X
  {
    std::vector<double> M(static_cast<std::size_t>(n * n));  // A_xi: column j = A_xi e_j
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double p = 0.0;
        for (int u = 0; u < m; ++u) p += eps_b(u) * L.xi[u] * L.alpha(u, j, i);
        M[i * n + j] = eps_t(i) * p;
      }
    std::vector<double> coord(static_cast<std::size_t>(n * n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double v = C.J[k].T[i].d;
        for (int j = 0; j < n; ++j) v += L.omega_t(k, i, j) * L.T[j];
        v -= (da / a) * (C.co[i * n + k] - eps * f.delta[k] * L.T[i]);
        for (int j = 0; j < n; ++j) v -= C.co[j * n + k] * M[i * n + j];
        coord[k * n + i] = v;
      }
    std::vector<double> frame(static_cast<std::size_t>(n * n), 0.0);
    for (int x = 0; x < n; ++x)
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) frame[x * n + i] += C.F(k, x) * coord[k * n + i];
    out["B"] = frame;
  }

  // (C): nabla^E_X xi + (eps a'/a) <X,T> xi + alpha(T, X)
  {
    std::vector<double> coord(static_cast<std::size_t>(n * m));
    for (int k = 0; k < n; ++k)
      for (int u = 0; u < m; ++u) {
        double v = C.J[k].xi[u].d;
        for (int w = 0; w < m; ++w) v += L.omega_b(k, u, w) * L.xi[w];
        v += r * f.delta[k] * L.xi[u];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) v += L.T[i] * C.co[j * n + k] * L.alpha(u, i, j);
        coord[k * m + u] = v;
      }
    std::vector<double> frame(static_cast<std::size_t>(n * m), 0.0);
    for (int x = 0; x < n; ++x)
      for (int u = 0; u < m; ++u)
        for (int k = 0; k < n; ++k) frame[x * m + u] += C.F(k, x) * coord[k * m + u];
    out["C"] = frame;
  }

  // (D) Gauss
  {
    auto curv = [&](int i, int j) {
      return [&, i, j](int k, int l) {
        double v = C.J[k].wt[(l * n + i) * n + j].d - C.J[l].wt[(k * n + i) * n + j].d;
        for (int q = 0; q < n; ++q) v += L.omega_t(k, i, q) * L.omega_t(l, q, j) - L.omega_t(l, i, q) * L.omega_t(k, q, j);
        return v;
      };
    };
    std::vector<double> res(static_cast<std::size_t>(n * n * n * n), 0.0);
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y)
        for (int z = 0; z < n; ++z)
          for (int w = 0; w < n; ++w) {
            double lhs = eps_t(w) * C.frame2(x, y, curv(w, z));
            double rhs = k1 * (g(x, z) * g(y, w) - g(y, z) * g(x, w)) +
                         k2 * (g(x, z) * t(y) * t(w) - g(y, z) * t(x) * t(w) - g(x, w) * t(y) * t(z) +
                               g(y, w) * t(x) * t(z));
            for (int u = 0; u < m; ++u)
              rhs += eps_b(u) * (-L.alpha(u, x, z) * L.alpha(u, y, w) + L.alpha(u, x, w) * L.alpha(u, y, z));
            put_antisymmetric(res, ((x * n + y) * n + z) * n + w, ((y * n + x) * n + z) * n + w, lhs - rhs);
          }
    out["D"] = res;
  }

  // (E) Codazzi
  {
    std::vector<double> nab(static_cast<std::size_t>(n * m * n * n));  // [k][u][i][j]
    for (int k = 0; k < n; ++k)
      for (int u = 0; u < m; ++u)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double v = C.J[k].al[(u * n + i) * n + j].d;
            for (int w = 0; w < m; ++w) v += L.omega_b(k, u, w) * L.alpha(w, i, j);
            for (int q = 0; q < n; ++q) v -= L.omega_t(k, q, i) * L.alpha(u, q, j) + L.omega_t(k, q, j) * L.alpha(u, i, q);
            nab[((k * m + u) * n + i) * n + j] = v;
          }
    auto nab_frame = [&](int y, int u, int i, int j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += C.F(k, y) * nab[((k * m + u) * n + i) * n + j];
      return v;
    };
    std::vector<double> res(static_cast<std::size_t>(m * n * n * n), 0.0);
    for (int u = 0; u < m; ++u)
      for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
          for (int z = 0; z < n; ++z) {
            double lhs = nab_frame(y, u, x, z) - nab_frame(x, u, y, z);
            double rhs = k2 * L.xi[u] * (t(x) * g(y, z) - t(y) * g(x, z));
            put_antisymmetric(res, ((u * n + x) * n + y) * n + z, ((u * n + y) * n + x) * n + z, lhs - rhs);
          }
    out["E"] = res;
  }

  // (F) Ricci
  {
    auto curv = [&](int u, int v) {
      return [&, u, v](int k, int l) {
        double val = C.J[k].wb[(l * m + u) * m + v].d - C.J[l].wb[(k * m + u) * m + v].d;
        for (int w = 0; w < m; ++w) val += L.omega_b(k, u, w) * L.omega_b(l, w, v) - L.omega_b(l, u, w) * L.omega_b(k, w, v);
        return val;
      };
    };
    std::vector<double> res(static_cast<std::size_t>(m * m * n * n), 0.0);
    for (int u = 0; u < m; ++u)
      for (int v = 0; v < m; ++v)
        for (int x = 0; x < n; ++x)
          for (int y = x + 1; y < n; ++y) {
            double lhs = C.frame2(x, y, curv(u, v));
            double rhs = 0.0;
            for (int j = 0; j < n; ++j)
              rhs += eps_t(j) * eps_b(v) * (L.alpha(v, y, j) * L.alpha(u, j, x) - L.alpha(v, x, j) * L.alpha(u, j, y));
            put_antisymmetric(res, ((u * m + v) * n + x) * n + y, ((u * m + v) * n + y) * n + x, lhs - rhs);
          }
    out["F"] = res;
  }

  // aux1
  {
    double v = -eps;
    for (int al = 0; al < s; ++al) v += C.eps(al) * f.Tc[al] * f.Tc[al];
    out["aux1"] = {v};
  }
  // aux2: delta from the coordinate metric against sum T_gamma omega_gamma
  {
    std::vector<double> Tcoord(static_cast<std::size_t>(n), 0.0);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i) Tcoord[l] += C.F(l, i) * L.T[i];
    std::vector<double> res(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      double metric = 0.0;
      for (int l = 0; l < n; ++l) {
        double gkl = 0.0;
        for (int i = 0; i < n; ++i) gkl += eps_t(i) * C.co[i * n + k] * C.co[i * n + l];
        metric += gkl * Tcoord[l];
      }
      double forms = 0.0;
      for (int al = 0; al < s; ++al) forms += f.Tc[al] * f.w(al, k);
      res[k] = metric - forms;
    }
    out["aux2"] = res;
  }
  // aux3: dT_al = sum T_ga omega_{ga al} + (a'/a) eps_al omega_al - (eps a'/a) T_al delta
  {
    std::vector<double> res(static_cast<std::size_t>(s * n));
    for (int al = 0; al < s; ++al)
      for (int k = 0; k < n; ++k) {
        double v = C.fj[k].Tc[al].d;
        for (int ga = 0; ga < s; ++ga) v -= f.Tc[ga] * f.omega(ga, al, k);
        v -= (da / a) * C.eps(al) * f.w(al, k);
        v += r * f.Tc[al] * f.delta[k];
        res[al * n + k] = v;
      }
    out["aux3"] = res;
  }

  const auto pl = planes(n);
  const int P = static_cast<int>(pl.size());
  auto dW = [&](int al, int k, int l) {
    return C.fj[k].W[al * n + l].d - C.fj[l].W[al * n + k].d;
  };
  auto dT = [&](int al, int k) { return C.fj[k].Tc[al].d; };
  auto wedge = [](double fk, double fl, double gk, double gl) { return fk * gl - fl * gk; };

  // aux4: dW + Omega ^ W = 0
  {
    std::vector<double> res(static_cast<std::size_t>(s * P));
    for (int al = 0; al < s; ++al)
      for (int p = 0; p < P; ++p) {
        auto [k, l] = pl[p];
        double v = dW(al, k, l);
        for (int ga = 0; ga < s; ++ga) v += wedge(f.omega(al, ga, k), f.omega(al, ga, l), f.w(ga, k), f.w(ga, l));
        res[al * P + p] = v;
      }
    out["aux4"] = res;
  }

  // flatness and the four closed forms it splits into
  {
    const std::size_t size = static_cast<std::size_t>(s * s * P);
    std::vector<double> flat(size), l1(size), l2(size), l3(size), l4(size);
    auto d_entry = [&](const std::vector<D> FormsAt<D>::*member, int al, int be, int k, int l) {
      return (C.fj[k].*member)[(al * s + be) * n + l].d - (C.fj[l].*member)[(al * s + be) * n + k].d;
    };
    for (int al = 0; al < s; ++al)
      for (int be = 0; be < s; ++be) {
        const double sab = C.eps(al) * C.eps(be);
        for (int p = 0; p < P; ++p) {
          auto [k, l] = pl[p];
          const std::size_t e = static_cast<std::size_t>((al * s + be) * P + p);
          double uu = 0.0, xx = 0.0, ox = 0.0, oo = 0.0;
          for (int ga = 0; ga < s; ++ga) {
            uu += wedge(f.ups(al, ga, k), f.ups(al, ga, l), f.ups(ga, be, k), f.ups(ga, be, l));
            xx += wedge(f.x(al, ga, k), f.x(al, ga, l), f.x(ga, be, k), f.x(ga, be, l));
            ox += wedge(f.omega(al, ga, k), f.omega(al, ga, l), f.x(ga, be, k), f.x(ga, be, l)) +
                  wedge(f.x(al, ga, k), f.x(al, ga, l), f.omega(ga, be, k), f.omega(ga, be, l));
            oo += wedge(f.omega(al, ga, k), f.omega(al, ga, l), f.omega(ga, be, k), f.omega(ga, be, l));
          }
          flat[e] = d_entry(&FormsAt<D>::Upsilon, al, be, k, l) + uu;

          auto xh = [&](int q) { return f.Tc[be] * f.w(al, q) - sab * f.Tc[al] * f.w(be, q); };
          const double delta_xh = wedge(f.delta[k], f.delta[l], xh(k), xh(l));
          const double delta_x = wedge(f.delta[k], f.delta[l], f.x(al, be, k), f.x(al, be, l));
          const double dT_w = wedge(dT(be, k), dT(be, l), f.w(al, k), f.w(al, l)) -
                              sab * wedge(dT(al, k), dT(al, l), f.w(be, k), f.w(be, l));
          const double t_dw = f.Tc[be] * dW(al, k, l) - sab * f.Tc[al] * dW(be, k, l);
          const double ww = wedge(f.w(al, k), f.w(al, l), f.w(be, k), f.w(be, l));
          const double eb = eps * C.eps(be);

          l1[e] = d_entry(&FormsAt<D>::X, al, be, k, l) - (k0 * delta_xh + r * dT_w + r * t_dw);
          l2[e] = xx - (-r * delta_x - q2 * eb * ww);
          l3[e] = ox - (-r * t_dw - r * dT_w - r * delta_x - 2.0 * q2 * eb * ww);
          l4[e] = d_entry(&FormsAt<D>::Omega, al, be, k, l) + oo - (-q2 * eb * ww + k0 * delta_xh);
        }
      }
    out["flatness"] = flat;
    out["flat_dX"] = l1;
    out["flat_XX"] = l2;
    out["flat_OX"] = l3;
    out["flat_dOmega"] = l4;
  }
  return out;
}

std::vector<std::size_t> interior_nodes(const ChartGrid& grid) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < grid.node_count(); ++v)
    if (grid.interior(grid.multi(v))) out.push_back(v);
  return out;
}

double default_tolerance(const GeometricData& data, DerivativeMode mode) {
  if (mode == DerivativeMode::prefer_analytic && data.has_derivatives()) return 1e-8;
  const double h = data.grid.max_spacing();
  return 10.0 * h * h;
}

bool ResidualReport::pass() const {
  for (const auto& e : equations)
    if (!e.pass) return false;
  return true;
}

const EquationResidual& ResidualReport::get(const std::string& name) const {
  for (const auto& e : equations)
    if (e.name == name) return e;
  throw std::out_of_range("no residual named " + name);
}

std::vector<std::string> ResidualReport::failing() const {
  std::vector<std::string> out;
  for (const auto& e : equations)
    if (!e.pass) out.push_back(e.name);
  return out;
}

ResidualReport& ResidualReport::merge(const ResidualReport& other) {
  equations.insert(equations.end(), other.equations.begin(), other.equations.end());
  return *this;
}

namespace {

ResidualReport aggregate(const GeometricData& data, const VerifyOptions& options,
                         const std::vector<std::string>& names) {
  data.grid.validate();
  const auto nodes = interior_nodes(data.grid);
  if (nodes.empty()) throw std::invalid_argument("grid too small for the stencils");
  std::vector<std::map<std::string, std::vector<double>>> per_node(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { per_node[i] = node_residuals(data, nodes[i], options.mode); });

  ResidualReport report;
  report.tol = options.tol.value_or(default_tolerance(data, options.mode));
  report.analytic_derivatives = options.mode == DerivativeMode::prefer_analytic && data.has_derivatives();
  for (const auto& name : names) {
    EquationResidual e;
    e.name = name;
    e.tol = report.tol;
    double sum_sq = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& entries = per_node[i].at(name);
      e.entries_per_node = entries.size();
      double worst = 0.0;
      for (double v : entries) worst = std::max(worst, std::isfinite(v) ? std::abs(v) : INFINITY);
      sum_sq += worst * worst;
      if (first || worst > e.sup) {
        e.sup = worst;
        e.worst_node = nodes[i];
        first = false;
      }
    }
    e.rms = std::sqrt(sum_sq / static_cast<double>(nodes.size()));
    e.pass = e.sup <= e.tol;
    report.equations.push_back(e);
  }
  return report;
}

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> lists) {
  std::vector<std::string> out;
  for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
  return out;
}

}  // namespace

ResidualReport structure_residuals(const GeometricData& data, const VerifyOptions& options) {
  return aggregate(data, options, kStructure);
}

ResidualReport aux_identity_residuals(const GeometricData& data, const VerifyOptions& options) {
  return aggregate(data, options, kAux);
}

ResidualReport flatness_residual(const GeometricData& data, const VerifyOptions& options) {
  return aggregate(data, options, kFlat);
}

ResidualReport full_report(const GeometricData& data, const VerifyOptions& options) {
  return aggregate(data, options, concat({&kStructure, &kAux, &kFlat}));
}

nlohmann::json report_to_json(const ResidualReport& report) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : report.equations)
    eqs.push_back({{"name", e.name},
                   {"sup", e.sup},
                   {"rms", e.rms},
                   {"worst_node", e.worst_node},
                   {"tol", e.tol},
                   {"pass", e.pass},
                   {"entries_per_node", e.entries_per_node}});
  return {{"format_version", 1},
          {"kind", "residual_report"},
          {"tol", report.tol},
          {"analytic_derivatives", report.analytic_derivatives},
          {"pass", report.pass()},
          {"equations", eqs}};
}

std::string report_to_text(const ResidualReport& report) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3);
  os << "tolerance " << report.tol << (report.analytic_derivatives ? " (analytic derivatives)" : " (finite differences)")
     << "\n";
  for (const auto& e : report.equations) {
    os << std::left << std::setw(10) << e.name << " sup " << e.sup << "  rms " << e.rms << "  worst node "
       << e.worst_node << "  " << (e.pass ? "pass" : "FAIL") << "\n";
  }
  os << (report.pass() ? "all residuals pass" : "residuals FAIL") << "\n";
  return os.str();
}

}  // namespace warpframe
