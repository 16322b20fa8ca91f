#include "warpframe/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace warpframe {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing key '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const char* key) {
  const json& v = require(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("key '") + key + "' has the wrong type");
  }
}

std::vector<double> number_array(const json& j, const char* key, std::size_t expected) {
  const json& v = require(j, key);
  if (!v.is_array()) throw SchemaError(std::string("'") + key + "' must be an array");
  if (v.size() != expected) {
    std::ostringstream os;
    os << "'" << key << "' has " << v.size() << " entries, expected " << expected;
    throw SchemaError(os.str());
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& x : v) {
    if (!x.is_number()) throw SchemaError(std::string("'") + key + "' must hold finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json fields_to_json(const FieldArrays& f) {
  return json{{"frame", f.frame}, {"omega_tangent", f.omega_tangent}, {"omega_bundle", f.omega_bundle},
              {"alpha", f.alpha}, {"T", f.T}, {"xi", f.xi}, {"pi", f.pi}};
}

FieldArrays fields_from_json(const json& j, int n, int m, std::size_t nodes) {
  const auto s = FieldSizes::of(n, m);
  FieldArrays f;
  f.frame = number_array(j, "frame", nodes * s.frame);
  f.omega_tangent = number_array(j, "omega_tangent", nodes * s.omega_tangent);
  f.omega_bundle = number_array(j, "omega_bundle", nodes * s.omega_bundle);
  f.alpha = number_array(j, "alpha", nodes * s.alpha);
  f.T = number_array(j, "T", nodes * s.T);
  f.xi = number_array(j, "xi", nodes * s.xi);
  f.pi = number_array(j, "pi", nodes * s.pi);
  return f;
}

struct Worst {
  double value = 0.0;
  std::size_t node = 0;
  std::string where;

  void offer(double v, std::size_t at, const std::string& label) {
    if (!(v <= value)) {
      value = v;
      node = at;
      where = label;
    }
  }
};

[[noreturn]] void invariant_failure(const std::string& what, const Worst& w, double tol) {
  std::ostringstream os;
  os << what << ": worst at node " << w.node << " " << w.where << ", magnitude " << w.value << " (tolerance "
     << tol << ")";
  throw InvariantError(os.str());
}

}  // namespace

json spec_to_json(const SignatureSpec& s) {
  return json{{"n", s.n}, {"m", s.m}, {"N", s.N}, {"p", s.p},        {"q", s.q},
              {"lambda", s.lambda}, {"epsilon", s.epsilon}, {"c", s.c}, {"signs", s.signs}};
}

SignatureSpec spec_from_json(const json& j) {
  SignatureSpec s;
  s.n = get_as<int>(j, "n");
  s.m = get_as<int>(j, "m");
  s.N = get_as<int>(j, "N");
  s.p = get_as<int>(j, "p");
  s.q = get_as<int>(j, "q");
  s.lambda = get_as<int>(j, "lambda");
  s.epsilon = get_as<int>(j, "epsilon");
  s.c = get_as<int>(j, "c");
  s.signs = get_as<std::vector<int>>(j, "signs");
  return s;
}

json warping_to_json(const WarpingFunction& w) {
  json domain = json::array({w.lo ? json(*w.lo) : json(nullptr), w.hi ? json(*w.hi) : json(nullptr)});
  json out{{"kind", to_string(w.kind)}, {"scale", w.scale}, {"shift", w.shift}, {"rate", w.rate},
           {"domain", domain}};
  if (w.kind == WarpKind::tabulated) {
    out["t"] = w.table_t;
    out["a"] = w.table_a;
  }
  return out;
}

WarpingFunction warping_from_json(const json& j) {
  WarpingFunction w;
  try {
    w.kind = warp_kind_from_string(get_as<std::string>(j, "kind"));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  w.scale = get_as<double>(j, "scale");
  w.shift = get_as<double>(j, "shift");
  w.rate = get_as<double>(j, "rate");
  const json& d = require(j, "domain");
  if (!d.is_array() || d.size() != 2) throw SchemaError("'domain' must be [lo, hi] with null for unbounded");
  for (int side = 0; side < 2; ++side) {
    if (d[side].is_null()) continue;
    if (!d[side].is_number()) throw SchemaError("'domain' bounds must be numbers or null");
    (side == 0 ? w.lo : w.hi) = d[side].get<double>();
  }
  if (w.kind == WarpKind::tabulated) {
    w.table_t = get_as<std::vector<double>>(j, "t");
    w.table_a = get_as<std::vector<double>>(j, "a");
  }
  return w;
}

json grid_to_json(const ChartGrid& g) {
  return json{{"n", g.n}, {"extents", g.extents}, {"spacing", g.spacing}, {"origin", g.origin},
              {"base_node", g.base_node}};
}

ChartGrid grid_from_json(const json& j) {
  ChartGrid g;
  g.n = get_as<int>(j, "n");
  g.extents = get_as<std::vector<int>>(j, "extents");
  g.spacing = get_as<std::vector<double>>(j, "spacing");
  g.origin = get_as<std::vector<double>>(j, "origin");
  g.base_node = get_as<std::vector<int>>(j, "base_node");
  return g;
}

json to_json(const GeometricData& data) {
  json out{{"format_version", kFormatVersion},
           {"kind", "geometric_data"},
           {"spec", spec_to_json(data.spec)},
           {"warping", warping_to_json(data.warping)},
           {"grid", grid_to_json(data.grid)},
           {"fields", fields_to_json(data.fields)}};
  if (data.has_derivatives()) {
    json d = json::array();
    for (const auto& f : data.derivatives) d.push_back(fields_to_json(f));
    out["derivatives"] = d;
  }
  if (data.source) out["source"] = json{{"family", data.source->family}, {"params", data.source->params}};
  return out;
}

GeometricData parse_data(const json& j) {
  if (!j.is_object()) throw SchemaError("document must be a JSON object");
  if (get_as<int>(j, "format_version") != kFormatVersion) throw SchemaError("unsupported format_version");
  if (get_as<std::string>(j, "kind") != "geometric_data") throw SchemaError("kind must be 'geometric_data'");
  GeometricData d;
  d.spec = spec_from_json(require(j, "spec"));
  d.warping = warping_from_json(require(j, "warping"));
  d.grid = grid_from_json(require(j, "grid"));
  if (d.spec.n < 1 || d.spec.m < 1) throw SchemaError("n and m must be positive");
  if (d.grid.n != d.spec.n) throw SchemaError("grid dimension must equal n");
  try {
    d.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  const std::size_t nodes = d.grid.node_count();
  d.fields = fields_from_json(require(j, "fields"), d.spec.n, d.spec.m, nodes);
  if (j.contains("derivatives")) {
    const json& dv = j.at("derivatives");
    if (!dv.is_array() || static_cast<int>(dv.size()) != d.spec.n)
      throw SchemaError("'derivatives' must hold one field set per coordinate direction");
    for (const auto& f : dv) d.derivatives.push_back(fields_from_json(f, d.spec.n, d.spec.m, nodes));
  }
  if (j.contains("source")) {
    const json& s = j.at("source");
    Provenance p;
    p.family = get_as<std::string>(s, "family");
    p.params = get_as<std::map<std::string, std::string>>(s, "params");
    d.source = p;
  }
  return d;
}

void check_invariants(const GeometricData& data) {
  const auto& spec = data.spec;
  const auto report = validate_signature(spec);
  if (!report.ok()) {
    std::string all = "signature invalid:";
    for (const auto& v : report.violations) all += " [" + v + "]";
    throw InvariantError(all);
  }
  try {
    data.warping.validate();
  } catch (const std::invalid_argument& e) {
    throw InvariantError(std::string("warping invalid: ") + e.what());
  }

  const int n = spec.n, m = spec.m;
  const std::size_t nodes = data.grid.node_count();
  const double rel = 1e-10;

  Worst sym, skew_t, skew_b, domain;
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto L = local_values(data, v);
    for (int u = 0; u < m; ++u)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double a = L.alpha(u, i, j), b = L.alpha(u, j, i);
          std::ostringstream os;
          os << "(u=" << u << ", i=" << i << ", j=" << j << ")";
          sym.offer(std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)), v, os.str());
        }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double a = L.omega_t(k, i, j), b = L.omega_t(k, j, i);
          double r = std::abs(a + spec.sign(1 + i) * spec.sign(1 + j) * b) / (1.0 + std::abs(a) + std::abs(b));
          std::ostringstream os;
          os << "(k=" << k << ", i=" << i << ", j=" << j << ")";
          skew_t.offer(r, v, os.str());
        }
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double x = L.omega_b(k, a, b), y = L.omega_b(k, b, a);
          double r = std::abs(x + spec.sign(1 + n + a) * spec.sign(1 + n + b) * y) /
                     (1.0 + std::abs(x) + std::abs(y));
          std::ostringstream os;
          os << "(k=" << k << ", u=" << a << ", v=" << b << ")";
          skew_b.offer(r, v, os.str());
        }
    }
    if (!data.warping.in_domain(L.pi) || !std::isfinite(L.pi)) {
      std::ostringstream os;
      os << "pi = " << L.pi;
      domain.offer(1.0, v, os.str());
    }
  }
  if (sym.value > rel) invariant_failure("alpha is not symmetric", sym, rel);
  if (skew_t.value > rel) invariant_failure("omega_tangent is not metric (skew)", skew_t, rel);
  if (skew_b.value > rel) invariant_failure("omega_bundle is not metric (skew)", skew_b, rel);
  if (domain.value > 0.0) {
    std::ostringstream os;
    os << "pi leaves the warping domain at node " << domain.node << " (" << domain.where << ")";
    throw InvariantError(os.str());
  }

  // T = eps grad(pi): T^i = eps * eps_i * sum_k F_ki d_k pi
  const bool analytic = data.has_derivatives();
  const double h = data.grid.max_spacing();
  const double tol = analytic ? 1e-8 : 10.0 * h * h + 1e-8;
  Worst grad;
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto L = local_values(data, v);
    std::vector<double> dpi(n);
    for (int k = 0; k < n; ++k)
      dpi[k] = analytic ? data.derivatives[k].pi[v] : grid_derivative(data.grid, data.fields.pi, 1, v, k)[0];
    for (int i = 0; i < n; ++i) {
      double g = 0.0;
      for (int k = 0; k < n; ++k) g += L.frame(k, i) * dpi[k];
      std::ostringstream os;
      os << "(i=" << i << ")";
      grad.offer(std::abs(L.T[i] - spec.epsilon * spec.sign(1 + i) * g), v, os.str());
    }
  }
  if (grad.value > tol) invariant_failure("T differs from eps * grad(pi)", grad, tol);
}

GeometricData load_data(const json& j) {
  GeometricData d = parse_data(j);
  check_invariants(d);
  return d;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

GeometricData load_data_file(const std::string& path) { return load_data(read_json_file(path)); }

std::string serialize(const GeometricData& data) { return to_json(data).dump(); }

void save_data_file(const GeometricData& data, const std::string& path) {
  write_text_file(path, serialize(data) + "\n");
}

json frame_matrix_to_json(const Eigen::MatrixXd& B) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(B.size()));
  for (int r = 0; r < B.rows(); ++r)
    for (int c = 0; c < B.cols(); ++c) flat.push_back(B(r, c));
  return json{{"format_version", kFormatVersion}, {"kind", "frame_matrix"}, {"rows", B.rows()}, {"data", flat}};
}

Eigen::MatrixXd frame_matrix_from_json(const json& j) {
  if (get_as<int>(j, "format_version") != kFormatVersion) throw SchemaError("unsupported format_version");
  if (get_as<std::string>(j, "kind") != "frame_matrix") throw SchemaError("kind must be 'frame_matrix'");
  const int rows = get_as<int>(j, "rows");
  if (rows < 1) throw SchemaError("rows must be positive");
  const auto flat = number_array(j, "data", static_cast<std::size_t>(rows) * rows);
  Eigen::MatrixXd B(rows, rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < rows; ++c) B(r, c) = flat[static_cast<std::size_t>(r) * rows + c];
  return B;
}

}  // namespace warpframe
