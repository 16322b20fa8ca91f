#include "warpframe/bundle_data.hpp"

namespace warpframe {

FieldArrays FieldArrays::zeros(int n, int m, std::size_t nodes) {
  const auto s = FieldSizes::of(n, m);
  FieldArrays f;
  f.frame.assign(nodes * s.frame, 0.0);
  f.omega_tangent.assign(nodes * s.omega_tangent, 0.0);
  f.omega_bundle.assign(nodes * s.omega_bundle, 0.0);
  f.alpha.assign(nodes * s.alpha, 0.0);
  f.T.assign(nodes * s.T, 0.0);
  f.xi.assign(nodes * s.xi, 0.0);
  f.pi.assign(nodes * s.pi, 0.0);
  return f;
}

namespace {

std::vector<double> slice(const std::vector<double>& v, int width, std::size_t node) {
  auto first = v.begin() + static_cast<std::ptrdiff_t>(node * width);
  return {first, first + width};
}

template <class S>
std::vector<S> combine(const std::vector<double>& value, const std::vector<double>& deriv) {
  std::vector<S> out(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) out[i] = S(value[i], deriv[i]);
  return out;
}

}  // namespace

LocalData<double> local_values(const GeometricData& data, std::size_t node) {
  const int n = data.n(), m = data.m();
  const auto s = FieldSizes::of(n, m);
  LocalData<double> L;
  L.n = n;
  L.m = m;
  L.F = slice(data.fields.frame, s.frame, node);
  L.wt = slice(data.fields.omega_tangent, s.omega_tangent, node);
  L.wb = slice(data.fields.omega_bundle, s.omega_bundle, node);
  L.al = slice(data.fields.alpha, s.alpha, node);
  L.T = slice(data.fields.T, s.T, node);
  L.xi = slice(data.fields.xi, s.xi, node);
  L.pi = data.fields.pi[node];
  return L;
}

std::vector<double> grid_derivative(const ChartGrid& grid, const std::vector<double>& values, int width,
                                    std::size_t node, int k) {
  MultiIndex idx = grid.multi(node);
  const int e = grid.extents[k];
  const double h = grid.spacing[k];
  auto at = [&](int offset) {
    MultiIndex j = idx;
    j[k] += offset;
    return grid.linear(j) * static_cast<std::size_t>(width);
  };
  std::vector<double> out(static_cast<std::size_t>(width));
  if (idx[k] > 0 && idx[k] < e - 1) {
    const auto p = at(1), q = at(-1);
    for (int c = 0; c < width; ++c) out[c] = (values[p + c] - values[q + c]) / (2 * h);
  } else if (idx[k] == 0) {
    const auto a0 = at(0), a1 = at(1), a2 = at(2);
    for (int c = 0; c < width; ++c)
      out[c] = (-3 * values[a0 + c] + 4 * values[a1 + c] - values[a2 + c]) / (2 * h);
  } else {
    const auto a0 = at(0), a1 = at(-1), a2 = at(-2);
    for (int c = 0; c < width; ++c)
      out[c] = (3 * values[a0 + c] - 4 * values[a1 + c] + values[a2 + c]) / (2 * h);
  }
  return out;
}

LocalData<Dual<double>> local_jet(const GeometricData& data, std::size_t node, int k, DerivativeMode mode) {
  using D = Dual<double>;
  const int n = data.n(), m = data.m();
  const auto s = FieldSizes::of(n, m);
  const bool analytic = mode == DerivativeMode::prefer_analytic && data.has_derivatives();
  auto deriv = [&](const std::vector<double> FieldArrays::*member, int width) {
    if (analytic) return slice(data.derivatives[k].*member, width, node);
    return grid_derivative(data.grid, data.fields.*member, width, node, k);
  };
  auto value = [&](const std::vector<double> FieldArrays::*member, int width) {
    return slice(data.fields.*member, width, node);
  };
  LocalData<D> L;
  L.n = n;
  L.m = m;
  L.F = combine<D>(value(&FieldArrays::frame, s.frame), deriv(&FieldArrays::frame, s.frame));
  L.wt = combine<D>(value(&FieldArrays::omega_tangent, s.omega_tangent),
                    deriv(&FieldArrays::omega_tangent, s.omega_tangent));
  L.wb = combine<D>(value(&FieldArrays::omega_bundle, s.omega_bundle),
                    deriv(&FieldArrays::omega_bundle, s.omega_bundle));
  L.al = combine<D>(value(&FieldArrays::alpha, s.alpha), deriv(&FieldArrays::alpha, s.alpha));
  L.T = combine<D>(value(&FieldArrays::T, s.T), deriv(&FieldArrays::T, s.T));
  L.xi = combine<D>(value(&FieldArrays::xi, s.xi), deriv(&FieldArrays::xi, s.xi));
  L.pi = D(data.fields.pi[node], deriv(&FieldArrays::pi, 1)[0]);
  return L;
}

std::vector<double> delta_components(const GeometricData& data, std::size_t node) {
  return delta_components(data.spec, local_values(data, node));
}

Eigen::MatrixXd shape_operator(const GeometricData& data, std::size_t node, const Eigen::VectorXd& eta) {
  const auto L = local_values(data, node);
  const auto& spec = data.spec;
  if (eta.size() != L.m) throw std::invalid_argument("eta must have m components");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L.n, L.n);
  for (int i = 0; i < L.n; ++i)
    for (int j = 0; j < L.n; ++j) {
      double pairing = 0.0;  // <alpha(e_i, e_j), eta>
      for (int u = 0; u < L.m; ++u) pairing += spec.sign(1 + L.n + u) * eta(u) * L.alpha(u, i, j);
      A(j, i) = spec.sign(1 + j) * pairing;
    }
  return A;
}

FVector s_tensor(const GeometricData& data, std::size_t node, const Eigen::VectorXd& X) {
  const auto L = local_values(data, node);
  const auto& spec = data.spec;
  const double a = data.warping.derivative(L.pi, 0);
  double pairing = 0.0;  // <X, T + xi> = <X, T>
  for (int i = 0; i < L.n; ++i) pairing += spec.sign(1 + i) * X(i) * L.T[i];
  const double scale = -1.0 / (a * spec.c);
  FVector out;
  out.node = node;
  out.tangent.resize(L.n);
  out.bundle.resize(L.m);
  for (int i = 0; i < L.n; ++i) out.tangent(i) = scale * (X(i) - spec.epsilon * pairing * L.T[i]);
  for (int u = 0; u < L.m; ++u) out.bundle(u) = scale * (-spec.epsilon * pairing * L.xi[u]);
  return out;
}

double f_inner(const SignatureSpec& spec, const FVector& s1, const FVector& s2) {
  double out = 0.0;
  for (int i = 0; i < spec.n; ++i) out += spec.sign(1 + i) * s1.tangent(i) * s2.tangent(i);
  for (int u = 0; u < spec.m; ++u) out += spec.sign(1 + spec.n + u) * s1.bundle(u) * s2.bundle(u);
  return out;
}

FVector whitney_derivative(const GeometricData& data, std::size_t node, int k,
                           const std::vector<FVector>& section) {
  const int n = data.n(), m = data.m();
  if (section.size() != data.grid.node_count()) throw std::invalid_argument("section must cover every node");
  if (data.grid.extents[k] < 3) throw std::invalid_argument("grid too small for the stencil");
  std::vector<double> packed(section.size() * static_cast<std::size_t>(n + m));
  for (std::size_t v = 0; v < section.size(); ++v) {
    for (int i = 0; i < n; ++i) packed[v * (n + m) + i] = section[v].tangent(i);
    for (int u = 0; u < m; ++u) packed[v * (n + m) + n + u] = section[v].bundle(u);
  }
  const auto d = grid_derivative(data.grid, packed, n + m, node, k);
  const auto L = local_values(data, node);
  const auto co = coframe(L);
  const auto& s = section[node];
  const auto& spec = data.spec;

  FVector out;
  out.node = node;
  out.tangent = Eigen::VectorXd::Zero(n);
  out.bundle = Eigen::VectorXd::Zero(m);
  // nabla_X Y = nabla Y + alpha(X, Y);  nabla_X eta = -A_eta X + nabla^E eta
  for (int i = 0; i < n; ++i) {
    double v = d[i];
    for (int j = 0; j < n; ++j) v += L.omega_t(k, i, j) * s.tangent(j);
    out.tangent(i) = v;
  }
  for (int u = 0; u < m; ++u) {
    double v = d[n + u];
    for (int w = 0; w < m; ++w) v += L.omega_b(k, u, w) * s.bundle(w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v += co[i * n + k] * s.tangent(j) * L.alpha(u, i, j);
    out.bundle(u) = v;
  }
  // -A_eta(d_k) with eta = bundle part
  for (int j = 0; j < n; ++j) {
    double aj = 0.0;
    for (int i = 0; i < n; ++i) {
      double pairing = 0.0;
      for (int u = 0; u < m; ++u) pairing += spec.sign(1 + n + u) * s.bundle(u) * L.alpha(u, i, j);
      aj += co[i * n + k] * spec.sign(1 + j) * pairing;
    }
    out.tangent(j) -= aj;
  }
  return out;
}

}  // namespace warpframe
