#pragma once

// Reading the immersion off a frame field: f_gamma = eps_gamma B_{gamma 0},
// f_{N+1} = pi, and the adapted frame E~_gamma = sum_alpha eps_alpha B_{alpha gamma} Ebar_alpha
// with Ebar_alpha = E_alpha / (c a) for alpha <= N and Ebar_{N+1} = dt.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpframe/bundle_data.hpp"
#include "warpframe/frame_solver.hpp"
#include "warpframe/oracle.hpp"

namespace warpframe {

struct ImmersionField {
  SignatureSpec spec;
  ChartGrid grid;
  std::vector<Eigen::VectorXd> f;       // per node: f_0..f_N, then t
  std::vector<Eigen::MatrixXd> frames;  // per node: column gamma = E~_gamma packed as (t, p_0..p_N)

  /// Packed ambient point (t, p).
  Eigen::VectorXd packed(std::size_t node) const;
  Eigen::VectorXd spatial(std::size_t node) const { return f[node].head(spec.N + 1); }
};

ImmersionField extract_immersion(const FrameField& field, const GeometricData& data);

/// Sample an explicit immersion on its own grid (frames left empty).
ImmersionField sample_immersion(const ExplicitImmersion& imm);

struct ImmersionResidual {
  std::string name;
  double sup = 0.0;
  double tol = 0.0;
  bool pass = true;
  bool evaluated = true;
  std::string note;
};

struct ImmersionReport {
  std::vector<ImmersionResidual> residuals;
  double max_quadric_defect = 0.0;
  bool pass() const;
  const ImmersionResidual& get(const std::string& name) const;
};

nlohmann::json immersion_report_to_json(const ImmersionReport& report);
std::string immersion_report_to_text(const ImmersionReport& report);

/// Residuals: isometry (frame orthonormality and df(e_i) = E~_i), dt_split, projection,
/// second_fundamental_form, normal_connection.
/// Default tolerance 10 h^2.
ImmersionReport verify_immersion(const ImmersionField& imm, const GeometricData& data,
                                 std::optional<double> tol = std::nullopt);

/// tau = (t -> t + t_shift) x O with O^T g0 O = g0.
struct Alignment {
  Eigen::MatrixXd O;
  double t_shift = 0.0;
  double defect = 0.0;  // sup over nodes of the max-abs coordinate difference after alignment
  int rounds = 0;
};

/// Least squares over the pseudo-orthogonal group, aligning f onto g. A t-shift is fitted
/// only for constant warping. When both fields carry frames their fiber parts join the fit.
/// Throws std::invalid_argument when the grids differ or the fit is ambiguous (collinear
/// points, or degenerate frames).
Alignment congruence_align(const ImmersionField& f, const ImmersionField& g, const WarpingFunction& warping);

}  // namespace warpframe
