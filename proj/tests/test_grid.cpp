#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homog/common.hpp"
#include "homog/grid.hpp"
#include "oracles.hpp"

using namespace homog;

TEST_CASE("quadrature rules: weights and polynomial exactness") {
  for (int order : {2, 3}) {
    QuadratureRule q = QuadratureRule::gauss(order);
    CHECK(q.npts == order);
    double wsum = 0.0, x1 = 0.0, x3 = 0.0, x5 = 0.0;
    for (int i = 0; i < q.npts; ++i) {
      wsum += q.wt[i];
      x1 += q.wt[i] * q.pt[i];
      x3 += q.wt[i] * std::pow(q.pt[i], 3);
      x5 += q.wt[i] * std::pow(q.pt[i], 5);
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(x3 == doctest::Approx(0.25).epsilon(1e-14));  // exact for degree 3
    if (order == 3) CHECK(x5 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(QuadratureRule::gauss(4), config_error);
  CHECK_THROWS_AS(QuadratureRule::gauss(1), config_error);
}

TEST_CASE("grid dof maps") {
  Grid gd(GridKind::dirichlet, 4);
  CHECK(gd.dof_count() == 9);
  CHECK(gd.node_dof(0, 2) == -1);
  CHECK(gd.node_dof(4, 1) == -1);
  CHECK(gd.node_dof(2, 0) == -1);
  CHECK(gd.node_dof(1, 1) == 0);
  CHECK(gd.node_dof(3, 3) == 8);

  Grid gp(GridKind::periodic, 4);
  CHECK(gp.dof_count() == 16);
  CHECK(gp.node_dof(4, 1) == gp.node_dof(0, 1));
  CHECK(gp.node_dof(2, 4) == gp.node_dof(2, 0));

  CHECK_THROWS_AS(Grid(GridKind::dirichlet, 1), config_error);
  CHECK_NOTHROW(Grid(GridKind::periodic, 1));
}

TEST_CASE("node functionals on exact interpolants") {
  Grid g(GridKind::dirichlet, 16);
  auto one = [](Vec2) { return 1.0; };
  auto lin = [](Vec2 p) { return p.x; };
  auto bil = [](Vec2 p) { return p.x * p.y; };
  CHECK(integrate(g, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(g, lin) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(integrate(g, bil) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(h1_seminorm_sq(g, lin) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm_sq(g, one) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("interpolation, point evaluation, gradients") {
  Grid g(GridKind::dirichlet, 8);
  ScalarField u = interpolate(g, [](Vec2 p) { return oracle::manufactured_u(p.x, p.y); });
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i) {
      Vec2 p = g.node_coord(i, j);
      CHECK(u.eval(p) == doctest::Approx(oracle::manufactured_u(p.x, p.y)).epsilon(1e-13));
    }
  // zero trace on the boundary
  CHECK(u.nodal(0, 3) == 0.0);
  CHECK(u.eval({0.0, 0.37}) == doctest::Approx(0.0).epsilon(1e-15));

  // gradient of a bilinear function is reproduced exactly inside cells
  Grid gp(GridKind::periodic, 8);
  ScalarField w(gp);
  for (int j = 0; j < gp.n; ++j)
    for (int i = 0; i < gp.n; ++i) w.v[gp.node_dof(i, j)] = 1.0;  // constant field
  Vec2 gr = w.grad({0.33, 0.71});
  CHECK(gr.x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(gr.y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("manufactured norms converge at second order") {
  double prev = 0.0;
  for (int n : {16, 32}) {
    Grid g(GridKind::dirichlet, n);
    ScalarField u = interpolate(g, [](Vec2 p) { return oracle::manufactured_u(p.x, p.y); });
    double err = std::abs(l2_norm_sq(u) - oracle::MANUFACTURED_L2_SQ);
    if (prev > 0) CHECK(prev / err > 3.0);  // ~4x with each halving of h
    prev = err;
    CHECK(l2_error(u, [](Vec2 p) { return oracle::manufactured_u(p.x, p.y); }) < 4.0 / (n * n));
  }
}

TEST_CASE("mean value and random fields") {
  Grid g(GridKind::periodic, 12);
  ScalarField u = random_nodal_field(g, 42);
  ScalarField v = random_nodal_field(g, 42);
  CHECK((u.v - v.v).norm() == 0.0);  // seeded determinism
  ScalarField w = random_nodal_field(g, 43);
  CHECK((u.v - w.v).norm() > 0.0);

  ScalarField s = random_smooth_field(g, 7, 2.0);
  CHECK(s.v.cwiseAbs().maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));

  Grid gd(GridKind::dirichlet, 12);
  ScalarField sd = random_smooth_field(gd, 7, 1.0);
  CHECK(std::abs(mean_value(sd)) < 1.0);  // finite, sane
  double m = mean_value(interpolate(gd, [](Vec2 p) {
    return std::sin(oracle::PI * p.x) * std::sin(oracle::PI * p.y);
  }));
  CHECK(m == doctest::Approx(4.0 / (oracle::PI * oracle::PI)).epsilon(1e-2));
}

TEST_CASE("friedrichs constant matches the spectral value") {
  CHECK(friedrichs_constant() == doctest::Approx(oracle::FRIEDRICHS_CONST).epsilon(1e-12));
  CHECK(friedrichs_constant() > 1.0 / std::sqrt(oracle::DIRICHLET_EV_UNIT_SQUARE));
}
