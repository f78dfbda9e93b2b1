#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "homog/cell.hpp"
#include "homog/coeffs.hpp"
#include "homog/common.hpp"
#include "homog/forms.hpp"
#include "oracles.hpp"

using namespace homog;
using nlohmann::json;

TEST_CASE("laminate directional profiles: closed-form gradient energy") {
  Grid y(GridKind::periodic, 128);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  CorrectorSet cs = solve_correctors(y, c);
  REQUIRE(cs.x_independent);
  REQUIRE(cs.at.size() == 1);
  const CellProfiles& p = cs.station(0);

  // w_1: transverse profile with |grad|^2 = 2/sqrt(3) - 1
  double gsq = p.grad_norm[0] * p.grad_norm[0];
  CHECK(gsq == doctest::Approx(oracle::LAYERED_PROFILE_GRAD_SQ).epsilon(5e-4));
  // w_2: the laminate is invariant along y_2, so the profile vanishes
  CHECK(l2_norm(p.w[1]) < 1e-11);
  // no drift term: w_0 = 0 and the solve short-circuits
  CHECK(p.w[2].v.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cs.worst_residual() <= 1e-10);
  CHECK(mean_value(p.w[0]) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("laminate profile matches the mean-zero primitive pointwise") {
  Grid y(GridKind::periodic, 128);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  ScalarField w1 = solve_cell_directional(y, c, {0.5, 0.5}, 0);

  double hm = oracle::layered_harmonic_mean(2.0, 1.0);
  oracle::MeanZeroPrimitive ref(
      [hm](double t) { return hm / (2.0 + std::sin(2.0 * oracle::PI * t)) - 1.0; });
  for (double s : {0.1, 0.3, 0.55, 0.8})
    CHECK(std::abs(w1.eval({s, 0.5}) - ref(s)) < 2e-4);
}

TEST_CASE("gradient drift: the drift profile is the negative potential") {
  Grid y(GridKind::periodic, 96);
  TwoScaleCoefficient c = make_preset("gradient-drift", json{{"psi", "cosy1"}});
  ScalarField w0 = solve_cell_drift(y, c, {0.5, 0.5});
  // C = grad(cos 2 pi y1); the cell problem inverts the Laplacian on div C,
  // so w0 = -cos(2 pi y1) up to its (zero) mean.
  double worst = 0.0;
  for (double s : {0.0, 0.2, 0.45, 0.7, 0.9})
    worst = std::max(worst, std::abs(w0.eval({s, 0.3}) + std::cos(2.0 * oracle::PI * s)));
  CHECK(worst < 2e-3);
}

TEST_CASE("macro-only drift solves to zero and collapses the stations") {
  Grid y(GridKind::periodic, 32);
  Grid macro(GridKind::dirichlet, 4);
  TwoScaleCoefficient c = make_preset("gradient-drift", json{{"psi", "negsq"}, {"k_amp", 1.0}});
  REQUIRE(!c.periodic_only);
  REQUIRE(!c.separable_scalar);
  CorrectorSet cs = solve_correctors(y, c, &macro);
  CHECK(cs.x_independent);  // every station solved to the same (zero) profiles
  CHECK(cs.at.size() == 1);
  for (int i = 0; i < 3; ++i) CHECK(cs.station(0).w[i].v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("x-dependent diffusion keeps one station per macro quadrature point") {
  Grid y(GridKind::periodic, 16);
  Grid macro(GridKind::dirichlet, 3);
  TwoScaleCoefficient c;
  c.name = "handmade";
  c.sample = [](Vec2 x, Vec2 yy) {
    CoeffSample s;
    s.A = Mat2::identity(2.0 + std::sin(2.0 * oracle::PI * yy.x) + x.x);
    return s;
  };
  c.alpha = 1.0;
  c.beta = 4.0;
  CorrectorSet cs = solve_correctors(y, c, &macro);
  CHECK(!cs.x_independent);
  int expect = macro.cells() * macro.quad.npts * macro.quad.npts;
  CHECK(cs.at.size() == static_cast<std::size_t>(expect));
  CHECK(cs.x_stations.size() == static_cast<std::size_t>(expect));
  // stations really differ
  CHECK((cs.at[0].w[0].v - cs.at.back().w[0].v).cwiseAbs().maxCoeff() > 1e-6);

  CHECK_THROWS_AS(solve_correctors(y, c, nullptr), config_error);
}

TEST_CASE("separable scalar families share one directional solve") {
  Grid y(GridKind::periodic, 32);
  TwoScaleCoefficient c = make_preset("separable", json::object());
  REQUIRE(c.separable_scalar);
  CorrectorSet cs = solve_correctors(y, c);
  CHECK(cs.x_independent);
  CHECK(cs.at.size() == 1);
}

TEST_CASE("pinned representative does not matter after normalization") {
  Grid y(GridKind::periodic, 24);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  PointSampler a = [&c](Vec2 yy) {
    CoeffSample s;
    s.A = c.eval({0.5, 0.5}, yy).A;
    return s;
  };
  Eigen::VectorXd rhs = -assemble_gradient_load(
      y, [&c](Vec2 yy) { return c.eval({0.5, 0.5}, yy).A.apply(Vec2{1.0, 0.0}); });
  ScalarField w_a = solve_cell_raw(y, a, rhs, 0);
  ScalarField w_b = solve_cell_raw(y, a, rhs, 7);
  normalize_mean_zero(w_a);
  normalize_mean_zero(w_b);
  CHECK((w_a.v - w_b.v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("incompatible right-hand sides are rejected") {
  Grid y(GridKind::periodic, 8);
  PointSampler ident = [](Vec2) { return CoeffSample{}; };
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(y.dof_count());
  CHECK_THROWS_WITH_AS(solve_cell_raw(y, ident, bad),
                       doctest::Contains("incompatible with the constant kernel"), config_error);

  Grid d(GridKind::dirichlet, 8);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d.dof_count());
  CHECK_THROWS_AS(solve_cell_raw(d, ident, z), config_error);  // not periodic

  Eigen::VectorXd wrong = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(solve_cell_raw(y, ident, wrong), config_error);  // size mismatch
  CHECK_THROWS_AS(solve_cell_raw(y, ident, z, -1), config_error);  // pin out of range
}

TEST_CASE("declared drift gradient bound covers the computed profile") {
  Grid y(GridKind::periodic, 64, 3);
  TwoScaleCoefficient c = make_preset("singular-drift", json{{"with_c", true}});
  CorrectorSet cs = solve_correctors(y, c);
  const CellProfiles& p = cs.station(0);
  CHECK(p.grad_norm[2] > 0.0);
  CHECK(p.grad_norm[2] <= cs.drift_grad_bound * (1.0 + 1e-9));
}
