#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "homog/coeffs.hpp"
#include "homog/common.hpp"
#include "homog/eigs.hpp"
#include "homog/forms.hpp"
#include "oracles.hpp"

using namespace homog;
using nlohmann::json;

namespace {
PointSampler const_sampler(const TwoScaleCoefficient& c) {
  return [&c](Vec2 x) { return c.eval(x, {0.0, 0.0}); };
}
}  // namespace

TEST_CASE("identity sampler reproduces the plain stiffness matrix") {
  Grid g(GridKind::dirichlet, 12);
  auto ident = [](Vec2) { return CoeffSample{}; };
  Eigen::SparseMatrix<double> A = assemble_matrix(g, ident);
  Eigen::SparseMatrix<double> K = assemble_stiffness(g);
  CHECK((A - K).norm() == 0.0);
}

TEST_CASE("load vector of a constant is the hat-function volume") {
  Grid g(GridKind::dirichlet, 8);
  Eigen::VectorXd L = assemble_load(g, [](Vec2) { return 1.0; });
  double h2 = g.h() * g.h();
  for (int i = 0; i < L.size(); ++i) CHECK(L[i] == doctest::Approx(h2).epsilon(1e-14));

  Eigen::VectorXd G = assemble_gradient_load(g, [](Vec2) { return Vec2{1.0, 0.0}; });
  CHECK(G.cwiseAbs().maxCoeff() < 1e-14);  // int d_x phi_i = 0 for interior hats
}

TEST_CASE("adjoint identity: E_{A,B,C,k}(u,v) = E_{A^T,C,B,k}(v,u)") {
  Grid g(GridKind::periodic, 9, 3);
  TwoScaleCoefficient c = make_preset(
      "constant",
      json{{"a11", 2.0}, {"a12", 0.5}, {"a21", -0.25}, {"a22", 1.5}, {"b1", 1.0}, {"b2", -2.0},
           {"c1", 0.75}, {"c2", 0.5}, {"k", 0.3}});
  auto adj = [&](Vec2 x) {
    CoeffSample s = c.eval(x, {0, 0});
    CoeffSample t;
    t.A = {s.A.a11, s.A.a21, s.A.a12, s.A.a22};
    t.B = s.C;
    t.C = s.B;
    t.k = s.k;
    return t;
  };
  Eigen::SparseMatrix<double> E = assemble_matrix(g, const_sampler(c));
  Eigen::SparseMatrix<double> Eadj = assemble_matrix(g, adj);
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    ScalarField u = random_nodal_field(g, rng.integer());
    ScalarField v = random_nodal_field(g, rng.integer());
    double lhs = v.v.dot(E * u.v);
    double rhs = u.v.dot(Eadj * v.v);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("smallest stiffness eigenvalue matches the Laplace spectrum") {
  Grid g(GridKind::dirichlet, 32);
  Eigen::SparseMatrix<double> K = assemble_stiffness(g);
  Eigen::SparseMatrix<double> M = assemble_mass(g);
  double ev = pencil_min_eig(K, M, 3);
  CHECK(ev == doctest::Approx(oracle::DIRICHLET_EV_UNIT_SQUARE).epsilon(2e-3));
}

TEST_CASE("resolvent form requires a positive scale") {
  Grid g(GridKind::dirichlet, 8);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  CHECK_THROWS_AS(assemble_resolvent_form(g, c, 0.0, 1.0), config_error);
  AssembledForm f = assemble_resolvent_form(g, c, 0.25, 1.0);
  CHECK(f.delta == 0.25);
  CHECK(f.lambda == 1.0);
  CHECK(f.E.rows() == g.dof_count());
}

TEST_CASE("analytic drift constant reproduces the frozen worked case") {
  TwoScaleCoefficient c = make_preset("layered", json{{"b_amp", 2.0}});
  Grid g(GridKind::dirichlet, 8);
  double b0 = estimate_beta0(g, c, 0.25, 1.0, Beta0Mode::analytic, TermKind::drift_b, 1);
  CHECK(b0 == doctest::Approx(oracle::DRIFT_CONST_M2_D2_L1).epsilon(1e-14));
  CHECK(b0 == doctest::Approx(oracle::drift_const_supnorm(2.0, 2, 1.0)).epsilon(1e-14));
  // potential constant is the sup norm
  TwoScaleCoefficient ck = make_preset("layered", json{{"k_amp", 0.7}});
  CHECK(estimate_beta0(g, ck, 0.25, 1.0, Beta0Mode::analytic, TermKind::potential, 1) ==
        doctest::Approx(0.7).epsilon(1e-14));
  // analytic mode refuses unbounded data
  TwoScaleCoefficient cs = make_preset("singular-drift", json::object());
  CHECK_THROWS_AS(estimate_beta0(g, cs, 0.25, 1.0, Beta0Mode::analytic, TermKind::drift_b, 1),
                  config_error);
}

TEST_CASE("estimated constants dominate fresh fields") {
  Grid g(GridKind::dirichlet, 16);
  const double lambda = 1.0;
  for (const char* name : {"layered", "singular-drift"}) {
    TwoScaleCoefficient c = name[0] == 'l'
                                ? make_preset("layered", json{{"b_amp", 1.5}, {"k_amp", 0.5}})
                                : make_preset(name, json::object());
    Beta0Mode mode = std::isfinite(c.sup_b) ? Beta0Mode::analytic : Beta0Mode::empirical;
    double delta = 0.25;
    double b0 = estimate_beta0(g, c, delta, lambda, mode, TermKind::drift_b, 17, 100);
    auto only_b = [&](Vec2 x) {
      CoeffSample full = c.eval_delta(delta, x);
      CoeffSample s;
      s.A = {0, 0, 0, 0};
      s.B = full.B;
      return s;
    };
    Eigen::SparseMatrix<double> T = assemble_matrix(g, only_b);
    Eigen::SparseMatrix<double> K = assemble_stiffness(g);
    Eigen::SparseMatrix<double> M = assemble_mass(g);
    Rng rng(991);
    for (int i = 0; i < 100; ++i) {
      ScalarField u = random_nodal_field(g, rng.integer());
      double lhs = std::abs(u.v.dot(T * u.v));
      double rhs = lambda * u.v.dot(K * u.v) + b0 * u.v.dot(M * u.v);
      CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-14);
    }
  }
}

TEST_CASE("composed index feeds a valid Garding bound") {
  Grid g(GridKind::dirichlet, 16);
  TwoScaleCoefficient c =
      make_preset("layered", json{{"b_amp", 1.0}, {"c_amp", 0.5}, {"k_amp", 1.0}});
  double beta0 = compose_form_index(g, c, {0.25}, Beta0Mode::automatic, 3);
  CHECK(beta0 > 0.0);
  AssembledForm f = assemble_resolvent_form(g, c, 0.25, 0.0);
  CHECK(check_garding(f, beta0, 128, 5) >= -1e-12);
  // no lower-order terms: index 0
  TwoScaleCoefficient pure = make_preset("layered", json::object());
  CHECK(compose_form_index(g, pure, {0.25}, Beta0Mode::automatic, 3) == 0.0);
}

TEST_CASE("diagnostics of a symmetric coercive form") {
  Grid g(GridKind::dirichlet, 16);
  TwoScaleCoefficient c = make_preset("constant", json::object());
  AssembledForm f = assemble_resolvent_form(g, c, 1.0, 1.0);
  FormDiagnostics d = diagnose_form(f, 32, 7);
  CHECK(d.beta0 == 0.0);
  CHECK(d.sector_bound <= 1.0 + 1e-8);  // Cauchy-Schwarz is sharp for symmetric forms
  CHECK(d.kappa1_exact > 0.0);
  CHECK(d.kappa1_exact <= d.kappa1_sampled + 1e-12);
  CHECK(d.kappa1_sampled <= d.kappa2_sampled);
  CHECK(d.friedrichs == doctest::Approx(oracle::FRIEDRICHS_CONST));
  CHECK(d.pencil_m_matrix);
}

TEST_CASE("sector check rejects a shift below the index") {
  Grid g(GridKind::dirichlet, 8);
  TwoScaleCoefficient c = make_preset("constant", json::object());
  AssembledForm f = assemble_resolvent_form(g, c, 1.0, 0.0);
  CHECK(check_sector(f, 1.0, 16, 3) >= 1.0);
  CHECK_THROWS_AS(check_sector(f, -1e6, 16, 3), config_error);
}

TEST_CASE("unit contraction on a compliant family matches the dense oracle") {
  Grid g(GridKind::dirichlet, 24);
  TwoScaleCoefficient c = make_preset("gradient-drift", json{{"psi", "negsq"}, {"k_amp", 1.0}});
  const double delta = 0.25;
  Rng rng(29);
  for (int t = 0; t < 3; ++t) {
    ScalarField u = random_smooth_field(g, rng.integer(), 2.0);
    double val = check_unit_contraction(g, c, delta, u);
    CHECK(val >= -1e-10 * (1.0 + l2_norm_sq(u) + h1_seminorm_sq(u)));

    oracle::ClampExcessIntegrand F;
    F.u = [&](double x, double y) { return u.eval({x, y}); };
    F.grad_u = [&](double x, double y) {
      Vec2 gr = u.grad({x, y});
      return std::array<double, 2>{gr.x, gr.y};
    };
    F.c = [&](double x, double y) {
      CoeffSample s = c.eval_delta(delta, {x, y});
      return std::array<double, 2>{s.C.x, s.C.y};
    };
    F.k = [&](double x, double y) { return c.eval_delta(delta, {x, y}).k; };
    double ref = oracle::clamp_excess_integral(F, 2048);
    CHECK(std::abs(val - ref) <= 0.02 * std::max(0.05, std::abs(ref)));
  }
}
