#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "homog/cell.hpp"
#include "homog/coeffs.hpp"
#include "homog/effective.hpp"
#include "homog/forms.hpp"
#include "homog/solver.hpp"
#include "oracles.hpp"

using namespace homog;
using nlohmann::json;

namespace {
double layered_a(double t) { return 2.0 + std::sin(2.0 * oracle::PI * t); }
}  // namespace

TEST_CASE("laminate homogenizes to the harmonic/arithmetic mean pair") {
  Grid y(GridKind::periodic, 64);
  Grid macro(GridKind::dirichlet, 8);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  CorrectorSet cs = solve_correctors(y, c);
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);
  REQUIRE(eff.x_independent);
  const CoeffSample& s = eff.at[0];
  CHECK(s.A.a11 == doctest::Approx(oracle::LAYERED_EFF_11).epsilon(2e-3));
  CHECK(s.A.a22 == doctest::Approx(oracle::LAYERED_EFF_22).epsilon(2e-3));
  CHECK(std::abs(s.A.a12) < 1e-10);
  CHECK(std::abs(s.A.a21) < 1e-10);
  CHECK(std::abs(s.B.x) + std::abs(s.B.y) + std::abs(s.C.x) + std::abs(s.C.y) + std::abs(s.k) <
        1e-12);

  auto [lo, hi] = check_effective_ellipticity(eff);
  CHECK(lo == doctest::Approx(oracle::LAYERED_EFF_11).epsilon(2e-3));
  CHECK(hi == doctest::Approx(oracle::LAYERED_EFF_22).epsilon(2e-3));
}

TEST_CASE("laminate lower-order terms against 1-D quadrature") {
  const double b_amp = 1.5, c_amp = 0.75, k_amp = 2.0;
  Grid y(GridKind::periodic, 128);
  Grid macro(GridKind::dirichlet, 4);
  TwoScaleCoefficient c = make_preset(
      "layered", json{{"b_amp", b_amp}, {"c_amp", c_amp}, {"k_amp", k_amp}});
  CorrectorSet cs = solve_correctors(y, c);
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);
  const CoeffSample& s = eff.at[0];

  // 1-D facts for a(t) = 2 + sin(2 pi t): the first profile has slope
  // hm/a - 1 and the drift profile satisfies a w0' = K - c_amp sin with K
  // fixed by periodicity.
  double hm = oracle::layered_harmonic_mean(2.0, 1.0);
  auto sin1 = [](double t) { return std::sin(2.0 * oracle::PI * t); };
  double I_sa = oracle::simpson([&](double t) { return sin1(t) / layered_a(t); }, 0.0, 1.0);
  double I_s2a =
      oracle::simpson([&](double t) { return sin1(t) * sin1(t) / layered_a(t); }, 0.0, 1.0);
  double K = c_amp * hm * I_sa;

  double b1_ref = b_amp * hm * I_sa;
  double c1_ref = K;
  double k_ref = 0.5 * k_amp + b_amp * (K * I_sa - c_amp * I_s2a);

  CHECK(std::abs(s.B.x - b1_ref) < 5e-4);
  CHECK(std::abs(s.B.y) < 5e-4);
  CHECK(std::abs(s.C.x - c1_ref) < 5e-4);
  CHECK(std::abs(s.C.y) < 5e-4);
  CHECK(std::abs(s.k - k_ref) < 5e-4);

  // with no test-side drift the potential average is exactly k_amp / 2
  TwoScaleCoefficient ck = make_preset("layered", json{{"k_amp", k_amp}});
  CorrectorSet csk = solve_correctors(y, ck);
  EffectiveCoefficients effk = assemble_effective(ck, csk, macro);
  CHECK(effk.at[0].k == doctest::Approx(0.5 * k_amp).epsilon(1e-10));
}

TEST_CASE("checkerboard reproduces the geometric-mean duality value") {
  Grid y(GridKind::periodic, 64);
  Grid macro(GridKind::dirichlet, 4);
  TwoScaleCoefficient c = make_preset("checkerboard", json{{"a_lo", 1.0}, {"a_hi", 4.0}});
  CorrectorSet cs = solve_correctors(y, c);
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);
  const CoeffSample& s = eff.at[0];
  double ref = oracle::checkerboard_eff(1.0, 4.0);
  CHECK(s.A.a11 == doctest::Approx(ref).epsilon(0.05));
  // coordinate swap is a symmetry of the pattern: the tensor is isotropic
  CHECK(s.A.a11 == doctest::Approx(s.A.a22).epsilon(1e-8));
  CHECK(std::abs(s.A.a12) < 1e-8);
}

TEST_CASE("separable family: stations scale with the macro factor") {
  Grid y(GridKind::periodic, 64);
  Grid macro(GridKind::dirichlet, 8);
  TwoScaleCoefficient c = make_preset("separable", json::object());  // x_mod = 0.5
  CorrectorSet cs = solve_correctors(y, c);
  REQUIRE(cs.x_independent);  // shared cell solves
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);
  REQUIRE(!eff.x_independent);  // but station-tabulated values
  int np = macro.quad.npts;
  REQUIRE(eff.at.size() == static_cast<std::size_t>(macro.cells() * np * np));

  auto a1 = [](Vec2 x) {
    return 1.0 + 0.5 * (0.5 + 0.5 * std::sin(oracle::PI * x.x) * std::sin(oracle::PI * x.y));
  };
  for (int cell : {0, 17, 30, 63}) {
    int cx = cell % macro.n, cy = cell / macro.n;
    for (int qa = 0; qa < np; ++qa) {
      Vec2 x = macro.qpoint(cx, cy, qa, qa);
      const CoeffSample& s = eff.station(cell, qa, qa);
      double f = a1(x);
      CHECK(s.A.a11 / f == doctest::Approx(oracle::LAYERED_EFF_11).epsilon(2e-3));
      CHECK(s.A.a22 / f == doctest::Approx(oracle::LAYERED_EFF_22).epsilon(2e-3));
    }
  }
  check_effective_ellipticity(eff);  // must not throw
}

TEST_CASE("ellipticity guard rejects forged declarations") {
  Grid y(GridKind::periodic, 32);
  Grid macro(GridKind::dirichlet, 4);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  CorrectorSet cs = solve_correctors(y, c);
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);

  EffectiveCoefficients forged = eff;
  forged.alpha_declared = 3.0;  // above the true minimum sqrt(3)
  CHECK_THROWS_AS(check_effective_ellipticity(forged), config_error);

  EffectiveCoefficients capped = eff;
  capped.beta_declared = 0.5;
  capped.grad_sum_max = 0.0;
  CHECK_THROWS_AS(check_effective_ellipticity(capped), config_error);
}

TEST_CASE("effective form, index, and homogenized solve") {
  Grid y(GridKind::periodic, 32);
  Grid macro(GridKind::dirichlet, 16);
  TwoScaleCoefficient c = make_preset("layered", json::object());
  CorrectorSet cs = solve_correctors(y, c);
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);

  AssembledForm f = assemble_effective_form(macro, eff, 1.0);
  CHECK(f.lambda == 1.0);
  double idx = effective_index(f, 3);
  CHECK(idx == 0.0);  // symmetric coercive: no negative part

  ScalarField rhs = interpolate(macro, [](Vec2 x) { return oracle::manufactured_f(x.x, x.y); });
  ScalarField u = solve_homogenized(f, rhs, idx);
  ResolventOperator op(f);
  ScalarField u2 = op.apply(rhs);
  CHECK((u.v - u2.v).cwiseAbs().maxCoeff() == 0.0);

  AssembledForm f0 = assemble_effective_form(macro, eff, 0.0);
  CHECK_THROWS_AS(solve_homogenized(f0, rhs, idx), config_error);  // 0 > 0 fails
}

TEST_CASE("station-tabulated coefficients insist on their own grid") {
  Grid y(GridKind::periodic, 16);
  Grid macro(GridKind::dirichlet, 8);
  TwoScaleCoefficient c = make_preset("separable", json::object());
  CorrectorSet cs = solve_correctors(y, c);
  EffectiveCoefficients eff = assemble_effective(c, cs, macro);
  Grid other(GridKind::dirichlet, 12);
  CHECK_THROWS_AS(assemble_effective_form(other, eff, 1.0), config_error);
  AssembledForm ok = assemble_effective_form(macro, eff, 1.0);
  CHECK(ok.E.rows() == macro.dof_count());
}
