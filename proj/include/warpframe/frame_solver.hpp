#pragma once

// Integration of B^{-1} dB = Omega - X over the chart lattice.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "warpframe/bundle_data.hpp"

namespace warpframe {

/// Connection-form matrices at one node; entry [k] is the matrix of d_k components.
struct ConnectionForms {
  std::size_t node = 0;
  std::vector<Eigen::MatrixXd> Omega, X, Upsilon;
  std::vector<Eigen::VectorXd> W;  // (omega_0 .. omega_{N+1})(d_k)
};

ConnectionForms assemble_forms(const GeometricData& data, std::size_t node);

/// Matrix exponential: scaling and squaring with the degree-13 Pade approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

/// max-abs entry of Z^T G Z - G.
double group_defect(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& G);

/// Iterates Z <- Z (3I - G Z^T G Z) / 2 until group_defect <= tol. Throws
/// std::runtime_error when 50 iterations do not reach tol.
Eigen::MatrixXd pseudo_orthonormalize(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& G, double tol = 1e-12);

struct IntegrationError : std::runtime_error {
  enum class Kind { bad_base_frame, blow_up };
  Kind kind;
  std::size_t node;
  IntegrationError(Kind k, std::size_t at, const std::string& msg) : std::runtime_error(msg), kind(k), node(at) {}
};

struct BaseFrameCheck {
  double group_defect = 0.0;
  double row_defect = 0.0;  // max_beta |B_{N+1,beta} - T_beta(x0)|
  bool ok = false;
};

BaseFrameCheck check_base_frame(const GeometricData& data, const Eigen::MatrixXd& B0, double tol = 1e-8);

/// A member of Z(x0): row N+1 is (T_beta(x0)), the remaining rows complete it to a
/// G-orthonormal set by sign-aware Gram-Schmidt over candidates e_i, then (e_i +- e_j)/sqrt 2,
/// taking for each row the candidate of matching sign with the largest |norm|
/// (earlier candidates win ties).
Eigen::MatrixXd default_base_frame(const GeometricData& data);

struct IntegrationOptions {
  bool renormalize = true;
  int renorm_interval = 16;     // renormalize where the lattice distance to x0 is a multiple
  std::vector<int> axis_order;  // empty: 0..n-1
  double base_tol = 1e-8;
};

struct FrameField {
  std::vector<Eigen::MatrixXd> B;  // per node
  double max_group_defect = 0.0;
  double max_row_defect = 0.0;
  std::size_t worst_row_node = 0;
  double max_theta = 0.0;  // max over interior nodes of |Upsilon - B^{-1} dB| (finite differences)
  double max_det_drift = 0.0;
  std::size_t steps = 0;
};

/// Lattice fill: walk axis_order[0] from x0, then axis_order[1] from every filled node, and so
/// on. Each step is B <- B expm(+-h (U_k(x) + U_k(x')) / 2). Walks at one stage run in parallel.
FrameField integrate_frame(const GeometricData& data, const Eigen::MatrixXd& B0,
                           const IntegrationOptions& options = {});

/// Max-abs entry of the difference between B(target) reached through axis order 0..n-1
/// and through n-1..0.
double path_independence_defect(const GeometricData& data, const Eigen::MatrixXd& B0, std::size_t target,
                                const IntegrationOptions& options = {});

}  // namespace warpframe
