#include "warpframe/immersion.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace warpframe {

Eigen::VectorXd ImmersionField::packed(std::size_t node) const {
  Eigen::VectorXd out(spec.N + 2);
  out(0) = f[node](spec.N + 1);
  out.tail(spec.N + 1) = f[node].head(spec.N + 1);
  return out;
}

ImmersionField extract_immersion(const FrameField& field, const GeometricData& data) {
  const auto& spec = data.spec;
  const int s = spec.N + 2;
  ImmersionField out;
  out.spec = spec;
  out.grid = data.grid;
  const std::size_t nodes = data.grid.node_count();
  out.f.resize(nodes);
  out.frames.resize(nodes);
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto& B = field.B.at(v);
    const double t = data.fields.pi[v];
    const double a = data.warping.derivative(t, 0);
    Eigen::VectorXd f(s);
    for (int g = 0; g <= spec.N; ++g) f(g) = spec.sign(g) * B(g, 0);
    f(s - 1) = t;
    Eigen::MatrixXd E(s, s);
    for (int g = 0; g < s; ++g) {
      E(0, g) = spec.epsilon * B(s - 1, g);
      for (int al = 0; al <= spec.N; ++al) E(1 + al, g) = spec.sign(al) * B(al, g) / (spec.c * a);
    }
    out.f[v] = f;
    out.frames[v] = E;
  }
  return out;
}

ImmersionField sample_immersion(const ExplicitImmersion& imm) {
  ImmersionField out;
  out.spec = imm.spec;
  out.grid = imm.grid;
  for (std::size_t v = 0; v < imm.grid.node_count(); ++v) {
    const auto pt = imm.point(v);
    Eigen::VectorXd f(imm.spec.N + 2);
    f.head(imm.spec.N + 1) = pt.p;
    f(imm.spec.N + 1) = pt.t;
    out.f.push_back(f);
  }
  return out;
}

bool ImmersionReport::pass() const {
  for (const auto& r : residuals)
    if (!r.pass) return false;
  return true;
}

const ImmersionResidual& ImmersionReport::get(const std::string& name) const {
  for (const auto& r : residuals)
    if (r.name == name) return r;
  throw std::out_of_range("no immersion residual named " + name);
}

nlohmann::json immersion_report_to_json(const ImmersionReport& report) {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : report.residuals)
    rs.push_back({{"name", r.name},
                  {"sup", r.sup},
                  {"tol", r.tol},
                  {"pass", r.pass},
                  {"evaluated", r.evaluated},
                  {"note", r.note}});
  return {{"format_version", 1},
          {"kind", "immersion_report"},
          {"pass", report.pass()},
          {"max_quadric_defect", report.max_quadric_defect},
          {"residuals", rs}};
}

std::string immersion_report_to_text(const ImmersionReport& report) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3);
  for (const auto& r : report.residuals) {
    os << std::left << std::setw(24) << r.name;
    if (r.evaluated)
      os << " sup " << r.sup << "  tol " << r.tol << "  " << (r.pass ? "pass" : "FAIL");
    else
      os << " skipped: " << r.note;
    os << "\n";
  }
  os << "quadric defect " << report.max_quadric_defect << "\n";
  return os.str();
}

namespace {

double ambient_dot(const SignatureSpec& spec, double a, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  double fiber = 0.0;
  for (int b = 0; b <= spec.N; ++b) fiber += spec.sign(b) * u(1 + b) * v(1 + b);
  return spec.epsilon * u(0) * v(0) + a * a * fiber;
}

Eigen::VectorXd christoffel(const SignatureSpec& spec, double a, double da, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
  const std::vector<double> uu(u.data(), u.data() + u.size()), vv(v.data(), v.data() + v.size());
  const auto g = warped_christoffel_packed<double>(spec, a, da, uu, vv);
  return Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
}

}  // namespace

ImmersionReport verify_immersion(const ImmersionField& imm, const GeometricData& data, std::optional<double> tol) {
  const auto& spec = data.spec;
  const auto& grid = data.grid;
  const int n = spec.n, m = spec.m, s = spec.N + 2;
  const double h = grid.max_spacing();
  const double t_ol = tol.value_or(10.0 * h * h);
  const std::size_t nodes = grid.node_count();
  if (imm.f.size() != nodes || imm.frames.size() != nodes)
    throw std::invalid_argument("immersion field does not match the data grid");

  ImmersionReport report;
  ImmersionResidual iso, split, proj, sff, normal;
  iso.name = "isometry";
  split.name = "dt_split";
  proj.name = "projection";
  sff.name = "second_fundamental_form";
  normal.name = "normal_connection";

  for (std::size_t v = 0; v < nodes; ++v) {
    const auto L = local_values(data, v);
    const double t = imm.f[v](s - 1);
    const double a = data.warping.derivative(t, 0);
    const auto& E = imm.frames[v];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double d = ambient_dot(spec, a, E.col(1 + i), E.col(1 + j)) - (i == j ? spec.sign(1 + i) : 0.0);
        iso.sup = std::max(iso.sup, std::abs(d));
      }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(s);
    for (int i = 0; i < n; ++i) w(1 + i) = L.T[i];
    for (int u = 0; u < m; ++u) w(1 + n + u) = L.xi[u];
    Eigen::VectorXd phi = E * w;  // packed ambient vector
    // coefficients in the Ebar basis: fiber ones scale by c a
    Eigen::VectorXd coeff(s);
    for (int al = 0; al <= spec.N; ++al) coeff(al) = phi(1 + al) * spec.c * a;
    coeff(s - 1) = phi(0);
    for (int al = 0; al < s; ++al) split.sup = std::max(split.sup, std::abs(coeff(al) - (al == s - 1 ? 1.0 : 0.0)));
    proj.sup = std::max(proj.sup, std::abs(t - L.pi));
    Eigen::VectorXd sp = imm.spatial(v);
    report.max_quadric_defect = std::max(report.max_quadric_defect, space_form_membership(spec, sp));
  }

  const auto interior_count = [&] {
    std::size_t c = 0;
    for (std::size_t v = 0; v < nodes; ++v) c += grid.interior(grid.multi(v));
    return c;
  }();
  if (interior_count == 0) {
    sff.evaluated = normal.evaluated = false;
    sff.note = normal.note = "grid has no interior nodes for the second-derivative stencils";
  } else {
    for (std::size_t v = 0; v < nodes; ++v) {
      const MultiIndex idx = grid.multi(v);
      if (!grid.interior(idx)) continue;
      const auto L = local_values(data, v);
      const auto co = coframe(L);
      const double t = imm.f[v](s - 1);
      const double a = data.warping.derivative(t, 0), da = data.warping.derivative(t, 1);
      const auto& E = imm.frames[v];
      auto at = [&](int k, int dk, int l, int dl) {
        MultiIndex j = idx;
        j[k] += dk;
        if (l >= 0) j[l] += dl;
        return grid.linear(j);
      };
      std::vector<Eigen::VectorXd> dF(n);
      for (int k = 0; k < n; ++k)
        dF[k] = (imm.packed(at(k, 1, -1, 0)) - imm.packed(at(k, -1, -1, 0))) / (2.0 * grid.spacing[k]);
      // df(e_i) must be E~_i
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd df = -E.col(1 + i);
        for (int k = 0; k < n; ++k) df += L.frame(k, i) * dF[k];
        iso.sup = std::max(iso.sup, df.cwiseAbs().maxCoeff());
      }
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Eigen::VectorXd d2;
          if (k == l)
            d2 = (imm.packed(at(k, 1, -1, 0)) - 2.0 * imm.packed(v) + imm.packed(at(k, -1, -1, 0))) /
                 (grid.spacing[k] * grid.spacing[k]);
          else
            d2 = (imm.packed(at(k, 1, l, 1)) - imm.packed(at(k, 1, l, -1)) - imm.packed(at(k, -1, l, 1)) +
                  imm.packed(at(k, -1, l, -1))) /
                 (4.0 * grid.spacing[k] * grid.spacing[l]);
          const Eigen::VectorXd hess = d2 + christoffel(spec, a, da, dF[k], dF[l]);
          for (int u = 0; u < m; ++u) {
            const double measured = spec.sign(1 + n + u) * ambient_dot(spec, a, hess, E.col(1 + n + u));
            double expected = 0.0;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) expected += co[i * n + k] * co[j * n + l] * L.alpha(u, i, j);
            sff.sup = std::max(sff.sup, std::abs(measured - expected));
          }
        }
      for (int k = 0; k < n; ++k)
        for (int u = 0; u < m; ++u) {
          const Eigen::VectorXd dE =
              (imm.frames[at(k, 1, -1, 0)].col(1 + n + u) - imm.frames[at(k, -1, -1, 0)].col(1 + n + u)) /
              (2.0 * grid.spacing[k]);
          const Eigen::VectorXd nabla = dE + christoffel(spec, a, da, dF[k], E.col(1 + n + u));
          for (int w = 0; w < m; ++w) {
            const double measured = spec.sign(1 + n + w) * ambient_dot(spec, a, nabla, E.col(1 + n + w));
            normal.sup = std::max(normal.sup, std::abs(measured - L.omega_b(k, w, u)));
          }
        }
    }
  }
  for (auto* r : {&iso, &split, &proj, &sff, &normal}) {
    r->tol = t_ol;
    r->pass = !r->evaluated || r->sup <= t_ol;
    report.residuals.push_back(*r);
  }
  return report;
}

Alignment congruence_align(const ImmersionField& f, const ImmersionField& g, const WarpingFunction& warping) {
  if (f.f.size() != g.f.size() || f.spec.N != g.spec.N)
    throw std::invalid_argument("congruence_align needs immersions over the same grid and ambient");
  const int d = f.spec.N + 1;
  const std::size_t nodes = f.f.size();
  Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(d, d);
  for (int b = 0; b < d; ++b) G0(b, b) = f.spec.sign(b);

  // Frame columns transform by O as well; when both sides carry frames they pin O down
  // even if the points lie in a proper subspace.
  const bool with_frames = f.frames.size() == nodes && g.frames.size() == nodes;
  const Eigen::Index per = with_frames ? 1 + d + 1 : 1;
  Eigen::MatrixXd P(d, static_cast<Eigen::Index>(nodes) * per), Q(d, static_cast<Eigen::Index>(nodes) * per);
  for (std::size_t v = 0; v < nodes; ++v) {
    const Eigen::Index c = static_cast<Eigen::Index>(v) * per;
    P.col(c) = f.spatial(v);
    Q.col(c) = g.spatial(v);
    if (with_frames) {
      P.middleCols(c + 1, d + 1) = f.frames[v].bottomRows(d);
      Q.middleCols(c + 1, d + 1) = g.frames[v].bottomRows(d);
    }
  }
  if (with_frames) {
    const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(P).singularValues();
    if (sv(d - 1) <= 1e-10 * sv(0)) throw std::invalid_argument("alignment ambiguous: frames are degenerate");
  } else {
    Eigen::MatrixXd centered = P;
    centered = centered.colwise() - P.rowwise().mean();
    const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(centered).singularValues();
    if (nodes < 2 || sv(0) == 0.0 || sv(std::min<Eigen::Index>(1, d - 1)) <= 1e-10 * sv(0))
      throw std::invalid_argument("alignment ambiguous: the points are collinear");
  }
  const Eigen::MatrixXd scatter = P * P.transpose();

  Alignment out;
  Eigen::MatrixXd O = (Q * P.transpose()) * scatter.completeOrthogonalDecomposition().pseudoInverse();
  try {
    O = pseudo_orthonormalize(O, G0);
  } catch (const std::runtime_error&) {
    O = Eigen::MatrixXd::Identity(d, d);
  }

  auto cost = [&](const Eigen::MatrixXd& M) { return (M * P - Q).squaredNorm(); };
  // Gauss-Newton over O <- O expm(G0 A), A skew.
  std::vector<std::pair<int, int>> params;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) params.emplace_back(a, b);
  const int np = static_cast<int>(params.size());
  for (out.rounds = 0; out.rounds < 50 && np > 0; ++out.rounds) {
    const Eigen::MatrixXd R = O * P - Q;
    Eigen::MatrixXd J(R.size(), np);
    for (int p = 0; p < np; ++p) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
      A(params[p].first, params[p].second) = 1.0;
      A(params[p].second, params[p].first) = -1.0;
      const Eigen::MatrixXd dR = O * G0 * A * P;
      J.col(p) = Eigen::Map<const Eigen::VectorXd>(dR.data(), dR.size());
    }
    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(R.data(), R.size());
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    for (int p = 0; p < np; ++p) {
      A(params[p].first, params[p].second) = step(p);
      A(params[p].second, params[p].first) = -step(p);
    }
    double scale = 1.0;
    const double c0 = cost(O);
    Eigen::MatrixXd next = O * expm(G0 * A);
    while (cost(next) > c0 && scale > 1e-6) {
      scale *= 0.5;
      next = O * expm(scale * G0 * A);
    }
    if (cost(next) > c0) break;
    O = pseudo_orthonormalize(next, G0, 1e-13);
    if (scale * step.cwiseAbs().maxCoeff() < 1e-14) break;
  }
  out.O = O;

  const bool constant = warping.kind == WarpKind::constant;
  if (constant) {
    double sum = 0.0;
    for (std::size_t v = 0; v < nodes; ++v) sum += g.f[v](d) - f.f[v](d);
    out.t_shift = sum / static_cast<double>(nodes);
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    const Eigen::VectorXd diff = O * f.spatial(v) - g.spatial(v);
    out.defect = std::max(out.defect, diff.cwiseAbs().maxCoeff());
    out.defect = std::max(out.defect, std::abs(f.f[v](d) + out.t_shift - g.f[v](d)));
  }
  return out;
}

}  // namespace warpframe
