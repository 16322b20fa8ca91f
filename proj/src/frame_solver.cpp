#include "warpframe/frame_solver.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "warpframe/forms.hpp"
#include "warpframe/parallel.hpp"

namespace warpframe {

ConnectionForms assemble_forms(const GeometricData& data, std::size_t node) {
  const auto f = assemble_local(data.spec, data.warping, local_values(data, node));
  const int n = f.n, s = f.size;
  ConnectionForms out;
  out.node = node;
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd O(s, s), X(s, s), U(s, s);
    Eigen::VectorXd W(s);
    for (int a = 0; a < s; ++a) {
      W(a) = f.w(a, k);
      for (int b = 0; b < s; ++b) {
        O(a, b) = f.omega(a, b, k);
        X(a, b) = f.x(a, b, k);
        U(a, b) = f.ups(a, b, k);
      }
    }
    out.Omega.push_back(O);
    out.X.push_back(X);
    out.Upsilon.push_back(U);
    out.W.push_back(W);
  }
  return out;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const Eigen::Index n = A.rows();
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm)) return Eigen::MatrixXd::Constant(n, n, NAN);
  int squarings = 0;
  if (norm > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  const Eigen::MatrixXd As = A / std::ldexp(1.0, squarings);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = As * As, A4 = A2 * A2, A6 = A4 * A2;
  const Eigen::MatrixXd U =
      As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  const Eigen::MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXd R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) R = R * R;
  return R;
}

double group_defect(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& G) {
  return (Z.transpose() * G * Z - G).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd pseudo_orthonormalize(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& G, double tol) {
  Eigen::MatrixXd Y = Z;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(Z.rows(), Z.cols());
  for (int iter = 0; iter <= 50; ++iter) {
    const double defect = group_defect(Y, G);
    if (defect <= tol) return Y;
    if (!std::isfinite(defect) || iter == 50) break;
    Y = Y * (3.0 * I - G * Y.transpose() * G * Y) / 2.0;
  }
  throw std::runtime_error("pseudo_orthonormalize did not converge (input too far from the group)");
}

BaseFrameCheck check_base_frame(const GeometricData& data, const Eigen::MatrixXd& B0, double tol) {
  BaseFrameCheck out;
  const int s = data.spec.N + 2;
  if (B0.rows() != s || B0.cols() != s) {
    out.group_defect = INFINITY;
    out.row_defect = INFINITY;
    return out;
  }
  const auto Tc = delta_components(data, data.grid.linear(data.grid.base_node));
  out.group_defect = group_defect(B0, data.spec.gram());
  for (int b = 0; b < s; ++b) out.row_defect = std::max(out.row_defect, std::abs(B0(s - 1, b) - Tc[b]));
  out.ok = out.group_defect <= tol && out.row_defect <= tol;
  return out;
}

Eigen::MatrixXd default_base_frame(const GeometricData& data) {
  const int s = data.spec.N + 2;
  const Eigen::MatrixXd G = data.spec.gram();
  const auto Tc = delta_components(data, data.grid.linear(data.grid.base_node));
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s, s);
  std::vector<int> filled = {s - 1};
  for (int b = 0; b < s; ++b) B(s - 1, b) = Tc[b];

  std::vector<Eigen::VectorXd> candidates;
  for (int i = 0; i < s; ++i) candidates.push_back(Eigen::VectorXd::Unit(s, i));
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) {
      candidates.push_back((Eigen::VectorXd::Unit(s, i) + Eigen::VectorXd::Unit(s, j)) / std::sqrt(2.0));
      candidates.push_back((Eigen::VectorXd::Unit(s, i) - Eigen::VectorXd::Unit(s, j)) / std::sqrt(2.0));
    }

  auto project = [&](Eigen::VectorXd v) {
    for (int pass = 0; pass < 2; ++pass)
      for (int r : filled) {
        Eigen::VectorXd row = B.row(r).transpose();
        v -= (v.dot(G * row) / G(r, r)) * row;
      }
    return v;
  };

  for (int r = 0; r < s - 1; ++r) {
    const double want = G(r, r);
    Eigen::VectorXd best;
    double best_q = 1e-8;
    for (const auto& cand : candidates) {
      Eigen::VectorXd v = project(cand);
      double q = v.dot(G * v);
      if (q * want > best_q) {
        best_q = q * want;
        best = v;
      }
    }
    if (best.size() == 0) throw std::runtime_error("cannot complete the base frame: no candidate of the required sign");
    B.row(r) = (best / std::sqrt(best_q)).transpose();
    filled.push_back(r);
  }
  return B;
}

namespace {

bool finite(const Eigen::MatrixXd& M) { return M.allFinite(); }

}  // namespace

FrameField integrate_frame(const GeometricData& data, const Eigen::MatrixXd& B0, const IntegrationOptions& options) {
  const auto& grid = data.grid;
  const int n = grid.n, s = data.spec.N + 2;
  const std::size_t nodes = grid.node_count();
  const std::size_t base = grid.linear(grid.base_node);
  const Eigen::MatrixXd G = data.spec.gram();

  const auto check = check_base_frame(data, B0, options.base_tol);
  if (!check.ok) {
    std::ostringstream os;
    os << "base frame is not in Z(x0): |B^T G B - G| = " << check.group_defect
       << ", |row N+1 - T| = " << check.row_defect;
    throw IntegrationError(IntegrationError::Kind::bad_base_frame, base, os.str());
  }
  if (options.renormalize && options.renorm_interval < 1)
    throw std::invalid_argument("renormalization interval must be positive");

  std::vector<int> order = options.axis_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }

  std::vector<std::vector<Eigen::MatrixXd>> U(nodes);
  parallel_for(nodes, [&](std::size_t v) { U[v] = assemble_forms(data, v).Upsilon; });

  FrameField field;
  field.B.assign(nodes, Eigen::MatrixXd());
  std::vector<char> filled(nodes, 0);
  field.B[base] = B0;
  filled[base] = 1;

  auto distance = [&](const MultiIndex& idx) {
    int d = 0;
    for (int k = 0; k < n; ++k) d += std::abs(idx[k] - grid.base_node[k]);
    return d;
  };

  for (int axis : order) {
    std::vector<std::size_t> starts;
    for (std::size_t v = 0; v < nodes; ++v)
      if (filled[v]) starts.push_back(v);
    const double h = grid.spacing[axis];
    parallel_for(starts.size(), [&](std::size_t which) {
      const std::size_t start = starts[which];
      for (int dir : {+1, -1}) {
        MultiIndex idx = grid.multi(start);
        std::size_t cur = start;
        while (idx[axis] + dir >= 0 && idx[axis] + dir < grid.extents[axis]) {
          idx[axis] += dir;
          const std::size_t next = grid.linear(idx);
          const Eigen::MatrixXd step = (dir * h * 0.5) * (U[cur][axis] + U[next][axis]);
          Eigen::MatrixXd Bn = field.B[cur] * expm(step);
          if (!finite(Bn)) {
            std::ostringstream os;
            os << "integration blew up at node " << next;
            throw IntegrationError(IntegrationError::Kind::blow_up, next, os.str());
          }
          if (options.renormalize && distance(idx) % options.renorm_interval == 0) {
            try {
              Bn = pseudo_orthonormalize(Bn, G);
            } catch (const std::runtime_error&) {
              std::ostringstream os;
              os << "frame left the group beyond repair at node " << next;
              throw IntegrationError(IntegrationError::Kind::blow_up, next, os.str());
            }
          }
          field.B[next] = Bn;
          filled[next] = 1;
          cur = next;
        }
      }
    });
    for (std::size_t v = 0; v < nodes; ++v)
      if (field.B[v].size() > 0) filled[v] = 1;
  }
  field.steps = nodes - 1;

  const double det0 = std::abs(B0.determinant());
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto& B = field.B[v];
    field.max_group_defect = std::max(field.max_group_defect, group_defect(B, G));
    const auto Tc = delta_components(data, v);
    for (int b = 0; b < s; ++b) {
      double d = std::abs(B(s - 1, b) - Tc[b]);
      if (d > field.max_row_defect) {
        field.max_row_defect = d;
        field.worst_row_node = v;
      }
    }
    field.max_det_drift = std::max(field.max_det_drift, std::abs(std::abs(B.determinant()) - det0));
  }

  std::vector<double> flat(nodes * static_cast<std::size_t>(s * s));
  for (std::size_t v = 0; v < nodes; ++v)
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) flat[v * s * s + a * s + b] = field.B[v](a, b);
  for (std::size_t v = 0; v < nodes; ++v) {
    if (!grid.interior(grid.multi(v))) continue;
    const Eigen::MatrixXd Binv = field.B[v].partialPivLu().inverse();
    for (int k = 0; k < n; ++k) {
      const auto d = grid_derivative(grid, flat, s * s, v, k);
      Eigen::MatrixXd dB(s, s);
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) dB(a, b) = d[a * s + b];
      field.max_theta = std::max(field.max_theta, (U[v][k] - Binv * dB).cwiseAbs().maxCoeff());
    }
  }
  return field;
}

double path_independence_defect(const GeometricData& data, const Eigen::MatrixXd& B0, std::size_t target,
                                const IntegrationOptions& options) {
  IntegrationOptions forward = options, backward = options;
  forward.axis_order.resize(data.grid.n);
  std::iota(forward.axis_order.begin(), forward.axis_order.end(), 0);
  backward.axis_order.assign(forward.axis_order.rbegin(), forward.axis_order.rend());
  const auto f1 = integrate_frame(data, B0, forward);
  const auto f2 = integrate_frame(data, B0, backward);
  return (f1.B.at(target) - f2.B.at(target)).cwiseAbs().maxCoeff();
}

}  // namespace warpframe
