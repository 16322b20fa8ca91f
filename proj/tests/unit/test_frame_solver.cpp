#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "warpframe/frame_solver.hpp"
#include "warpframe/oracle.hpp"

using namespace warpframe;
using Eigen::MatrixXd;

namespace {

MatrixXd signature(std::initializer_list<double> s) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
  Eigen::Index i = 0;
  for (double x : s) v(i++) = x;
  return v.asDiagonal();
}

// an element of the Lie algebra of O(G): G A^T G = -A
MatrixXd algebra_element(const MatrixXd& G, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> N(0.0, scale);
  MatrixXd S = MatrixXd::Zero(G.rows(), G.cols());
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = i + 1; j < S.cols(); ++j) {
      S(i, j) = N(rng);
      S(j, i) = -S(i, j);
    }
  return G * S;
}

}  // namespace

TEST_CASE("expm agrees with Eigen's matrix exponential") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0.0, 1.0);
  for (double scale : {1e-6, 0.1, 1.0, 5.0, 40.0}) {
    MatrixXd A(5, 5);
    for (Eigen::Index i = 0; i < A.size(); ++i) A(i) = scale * N(rng);
    const MatrixXd ref = A.exp();
    const MatrixXd ours = expm(A);
    INFO(scale);
    CHECK((ours - ref).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  CHECK((expm(MatrixXd::Zero(3, 3)) - MatrixXd::Identity(3, 3)).norm() <= 1e-15);
  MatrixXd bad = MatrixXd::Zero(2, 2);
  bad(0, 1) = NAN;
  CHECK_FALSE(expm(bad).allFinite());
}

TEST_CASE("expm of an algebra element lies in the group") {
  std::mt19937_64 rng(7);
  for (const MatrixXd& G : {signature({1, 1, 1, 1}), signature({-1, 1, 1, -1}), signature({1, -1, -1, 1, 1})}) {
    const MatrixXd Z = expm(algebra_element(G, rng, 0.7));
    CHECK(group_defect(Z, G) <= 1e-12);
  }
}

TEST_CASE("group_defect and pseudo_orthonormalize") {
  const MatrixXd G = signature({-1, 1, 1});
  CHECK(group_defect(MatrixXd::Identity(3, 3), G) == 0.0);
  MatrixXd Z = MatrixXd::Identity(3, 3);
  Z(1, 2) = 0.01;
  CHECK(group_defect(Z, G) == doctest::Approx(0.01));

  std::mt19937_64 rng(9);
  const MatrixXd O = expm(algebra_element(G, rng, 0.5));
  const MatrixXd noisy = O + 1e-4 * MatrixXd::Random(3, 3);
  const MatrixXd fixed = pseudo_orthonormalize(noisy, G);
  CHECK(group_defect(fixed, G) <= 1e-12);
  CHECK((fixed - O).cwiseAbs().maxCoeff() < 1e-3);
  CHECK_THROWS_AS(pseudo_orthonormalize(5.0 * MatrixXd::Identity(3, 3), G), std::runtime_error);
}

TEST_CASE("the default base frame is admissible on every example") {
  for (const auto& name : example_names()) {
    const auto d = canonical_example(name).data;
    const MatrixXd B0 = default_base_frame(d);
    const auto chk = check_base_frame(d, B0);
    INFO(name << " " << chk.group_defect << " " << chk.row_defect);
    CHECK(chk.ok);
    CHECK(chk.group_defect <= 1e-12);
    CHECK(chk.row_defect <= 1e-12);
  }
}

TEST_CASE("check_base_frame rejects a frame with the wrong last row") {
  const auto d = canonical_example("helix").data;
  MatrixXd B0 = default_base_frame(d);
  const auto G = d.spec.gram();
  // a G-orthogonal change of the last row keeps the group constraint but breaks the row constraint
  MatrixXd swap = MatrixXd::Identity(B0.rows(), B0.cols());
  const Eigen::Index last = B0.rows() - 1;
  swap.row(last).swap(swap.row(last - 1));
  REQUIRE(G(last, last) == G(last - 1, last - 1));
  const auto chk = check_base_frame(d, swap * B0);
  CHECK(chk.group_defect <= 1e-12);
  CHECK_FALSE(chk.ok);
  try {
    integrate_frame(d, swap * B0);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.kind == IntegrationError::Kind::bad_base_frame);
  }
}

TEST_CASE("integration keeps the frame on the group and the last row on T") {
  for (const auto& [name, params] : std::vector<std::pair<std::string, Params>>{
           {"slice", {}}, {"helix", {}}, {"helix", {{"n", "2"}}}, {"lorentz_cylinder", {}}, {"great_subsphere", {{"r", "0.8"}}}}) {
    const auto d = canonical_example(name, params).data;
    const auto field = integrate_frame(d, default_base_frame(d));
    const double h = d.grid.max_spacing();
    INFO(name << " group " << field.max_group_defect << " row " << field.max_row_defect);
    CHECK(field.B.size() == d.grid.node_count());
    CHECK(field.steps + 1 == d.grid.node_count());
    CHECK(field.max_group_defect <= 1e-8);
    CHECK(field.max_row_defect <= 10 * h * h);
  }
}

TEST_CASE("without renormalization the group defect still stays at roundoff for short walks") {
  const auto d = canonical_example("helix").data;
  IntegrationOptions o;
  o.renormalize = false;
  const auto field = integrate_frame(d, default_base_frame(d), o);
  CHECK(field.max_group_defect <= 1e-10);
}

TEST_CASE("path independence converges at second order") {
  const auto coarse = canonical_example("helix", {{"n", "2"}, {"extent", "17"}}).data;
  const auto fine = refine_example(coarse, 2);
  const double a = path_independence_defect(coarse, default_base_frame(coarse), coarse.grid.node_count() - 1);
  const double b = path_independence_defect(fine, default_base_frame(fine), fine.grid.node_count() - 1);
  INFO(a << " " << b);
  CHECK(a > 0.0);
  CHECK(std::log2(a / b) >= 1.8);
}

TEST_CASE("integration on flat data stays on the group") {
  const auto d = fixtures::flat_data(2, 1, 5, 0.1);
  const MatrixXd B0 = default_base_frame(d);
  const auto field = integrate_frame(d, B0);
  CHECK(field.max_group_defect <= 1e-12);
}

TEST_CASE("non-finite forms are reported as blow up at a node") {
  auto d = canonical_example("helix").data;
  d.fields.omega_bundle.assign(d.fields.omega_bundle.size(), 0.0);
  d.fields.alpha[20 * d.m()] = INFINITY;
  try {
    integrate_frame(d, default_base_frame(d));
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.kind == IntegrationError::Kind::blow_up);
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}
