#include <cmath>

#include "doctest.h"
#include "warpframe/ambient.hpp"
#include "warpframe/oracle.hpp"

using namespace warpframe;

namespace {

// induced metric d_k f . d_l f from centered differences of the immersion map
Eigen::MatrixXd metric_by_differences(const ExplicitImmersion& imm, const std::vector<double>& x) {
  const int n = imm.spec.n;
  const double h = 1e-5;
  std::vector<Eigen::VectorXd> df;
  for (int k = 0; k < n; ++k) {
    auto xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const auto fp = imm.map(xp), fm = imm.map(xm);
    Eigen::VectorXd v(static_cast<Eigen::Index>(fp.size()));
    for (std::size_t i = 0; i < fp.size(); ++i) v(static_cast<Eigen::Index>(i)) = (fp[i] - fm[i]) / (2 * h);
    df.push_back(v);
  }
  const auto base = imm.point_at(x);
  const double a = warp_eval(imm.warping, base.t).a;
  Eigen::MatrixXd g(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = imm.spec.epsilon * df[k](0) * df[l](0);
      for (int b = 0; b <= imm.spec.N; ++b) s += a * a * imm.spec.sign(b) * df[k](1 + b) * df[l](1 + b);
      g(k, l) = s;
    }
  return g;
}

}  // namespace

TEST_CASE("the frames are orthonormal for the metric of the immersion") {
  for (const auto& name : example_names()) {
    const auto ex = canonical_example(name);
    const auto& d = ex.data;
    const int n = d.n();
    for (std::size_t node = 0; node < d.grid.node_count(); node += 7) {
      Eigen::MatrixXd F(n, n);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) F(k, i) = d.fields.frame[node * n * n + k * n + i];
      const Eigen::MatrixXd g = metric_by_differences(ex.immersion, d.grid.coordinates(d.grid.multi(node)));
      Eigen::MatrixXd want = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) want(i, i) = d.spec.sign(1 + i);
      INFO(name << " node " << node);
      CHECK((F.transpose() * g * F - want).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("slice: umbilic with A_xi = -(a'/a) Id and T = 0") {
  for (const char* name : {"slice", "desitter_slice"}) {
    const auto d = canonical_example(name, {{"n", "3"}, {"extent", "5"}}).data;
    for (std::size_t node = 0; node < d.grid.node_count(); node += 11) {
      const auto w = warp_eval(d.warping, d.fields.pi[node]);
      Eigen::VectorXd xi(1);
      xi(0) = 1.0;
      const Eigen::MatrixXd A = shape_operator(d, node, xi);
      INFO(name << " node " << node << "\n" << A);
      CHECK((A + (w.da / w.a) * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
      for (int i = 0; i < 3; ++i) CHECK(d.fields.T[node * 3 + i] == 0.0);
      CHECK(std::abs(d.fields.xi[node]) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("vertical geodesic: T = dt direction and alpha = 0") {
  for (const char* eps : {"1", "-1"}) {
    const auto d = canonical_example("vertical_geodesic", {{"epsilon", eps}}).data;
    for (std::size_t node = 0; node < d.grid.node_count(); ++node) {
      CHECK(std::abs(d.fields.T[node]) == doctest::Approx(1.0));
      CHECK(d.fields.xi[node] == doctest::Approx(0.0));
      CHECK(d.fields.alpha[node] == doctest::Approx(0.0));
      CHECK(d.fields.pi[node] == doctest::Approx(d.grid.coordinates(d.grid.multi(node))[0] + 0.5));
    }
  }
}

TEST_CASE("analytic and finite-difference inductions agree on the field values") {
  const auto a = canonical_example("lorentz_cylinder").data;
  const auto b = canonical_example("lorentz_cylinder", {}, {false}).data;
  CHECK(a.has_derivatives());
  CHECK_FALSE(b.has_derivatives());
  CHECK(a.fields.alpha == b.fields.alpha);
  CHECK(a.fields.frame == b.fields.frame);
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_AS(example_immersion("torus"), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("slice", {{"radius", "2"}}), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("slice", {{"n", "x"}}), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("slice", {{"epsilon", "2"}}), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("helix", {{"n", "3"}}), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("helix", {{"n", "2"}, {"extent", "129"}}), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("great_subsphere", {{"n", "3"}, {"N", "3"}}), std::invalid_argument);
  CHECK_THROWS_AS(example_immersion("great_subsphere", {{"r", "1.5"}}), std::invalid_argument);
}

TEST_CASE("a tilted de Sitter slice that turns timelike fails the declared signature") {
  try {
    canonical_example("desitter_slice", {{"tilt", "3"}});
    FAIL("expected a signature failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("refine_example keeps the chart and the family") {
  const auto d = canonical_example("helix", {{"extent", "9"}, {"h", "0.1"}}).data;
  const auto r = refine_example(d, 2);
  CHECK(r.grid.extents[0] == 17);
  CHECK(r.grid.spacing[0] == doctest::Approx(0.05));
  CHECK(r.grid.origin[0] == doctest::Approx(d.grid.origin[0]));
  REQUIRE(r.source.has_value());
  CHECK(r.source->family == "helix");
  CHECK(r.source->params.at("extent") == "17");
  // every coarse node reappears in the fine grid with the same fields
  for (std::size_t v = 0; v < d.grid.node_count(); ++v) {
    const std::size_t fine = r.grid.linear({d.grid.multi(v)[0] * 2});
    CHECK(r.fields.pi[fine] == doctest::Approx(d.fields.pi[v]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(refine_example(d, 3), std::invalid_argument);
  auto bare = d;
  bare.source.reset();
  CHECK_THROWS_AS(refine_example(bare, 2), std::invalid_argument);
}
