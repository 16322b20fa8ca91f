#pragma once

// Residuals of the structure equations (A)-(F), the auxiliary frame identities
// aux1..aux4, the flatness identity dU + U^U = 0 for U = Omega - X, and the four
// closed forms it splits into (flat_dX, flat_XX, flat_OX, flat_dOmega). All
// residuals are evaluated at interior grid nodes, on frame inputs for (A)-(F) and on coordinate 2-planes
// k < l for the form identities.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpframe/bundle_data.hpp"

namespace warpframe {

struct EquationResidual {
  std::string name;
  double sup = 0.0;  // max over nodes of the max-abs entry
  double rms = 0.0;  // root mean square of the per-node max-abs entries
  std::size_t worst_node = 0;
  double tol = 0.0;
  bool pass = true;
  std::size_t entries_per_node = 0;
};

struct ResidualReport {
  double tol = 0.0;
  bool analytic_derivatives = false;
  std::vector<EquationResidual> equations;

  bool pass() const;
  const EquationResidual& get(const std::string& name) const;
  std::vector<std::string> failing() const;
  ResidualReport& merge(const ResidualReport& other);
};

nlohmann::json report_to_json(const ResidualReport& report);
std::string report_to_text(const ResidualReport& report);

struct VerifyOptions {
  std::optional<double> tol;  // default: 1e-8 with analytic derivatives, 10 h^2 otherwise
  DerivativeMode mode = DerivativeMode::prefer_analytic;
};

double default_tolerance(const GeometricData& data, DerivativeMode mode);

/// Signed residual entries at one node, keyed by equation name. Layouts
/// (frame indices a, b, c, d over tangent directions; u, v over the bundle;
/// al, be over 0..N+1; k < l coordinate pairs enumerated lexicographically):
///   A, aux1      [1]
///   B            [a][i]          frame input e_a, tangent component i
///   C            [a][u]
///   D            [a][b][c][d]    R(e_a,e_b,e_c,e_d) - right-hand side
///   E            [u][a][b][c]    u-component of (nabla_{e_b} alpha)(e_a,e_c) - (nabla_{e_a} alpha)(e_b,e_c) - right-hand side
///   F            [u][v][a][b]    u-component of R^E(e_a,e_b)e_v - right-hand side
///   aux2         [k]
///   aux3         [al][k]
///   aux4         [al][kl]
///   flatness, flat_*         [al][be][kl]
std::map<std::string, std::vector<double>> node_residuals(const GeometricData& data, std::size_t node,
                                                          DerivativeMode mode = DerivativeMode::prefer_analytic);

/// Interior nodes in increasing linear order.
std::vector<std::size_t> interior_nodes(const ChartGrid& grid);

ResidualReport structure_residuals(const GeometricData& data, const VerifyOptions& options = {});
ResidualReport aux_identity_residuals(const GeometricData& data, const VerifyOptions& options = {});
ResidualReport flatness_residual(const GeometricData& data, const VerifyOptions& options = {});
/// Everything above in one pass.
ResidualReport full_report(const GeometricData& data, const VerifyOptions& options = {});

}  // namespace warpframe
