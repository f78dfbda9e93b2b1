#include "homog/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "homog/eigs.hpp"

namespace homog {

namespace {

constexpr double PI = 3.14159265358979323846;

/// Y-quadrature of the homogenization integrands at one station.
CoeffSample effective_at(const TwoScaleCoefficient& c, const CellProfiles& p, const Grid& y, Vec2 x) {
  // Columns of A_eff: int A (e_j + grad w_j); B_eff_j: int (b_j + B . grad w_j);
  // C_eff: int (C + A grad w_0); k_eff: int (k + B . grad w_0).
  double a[2][2] = {{0, 0}, {0, 0}};
  Vec2 b{}, cc{};
  double kk = 0.0;
  const double inv_h = static_cast<double>(y.n);
  for (int cy = 0; cy < y.n; ++cy)
    for (int cx = 0; cx < y.n; ++cx) {
      Vec2 g[3];  // per-profile gradients at a quadrature point
      double v[3][4];
      for (int i = 0; i < 3; ++i) {
        v[i][0] = p.w[i].nodal(cx, cy);
        v[i][1] = p.w[i].nodal(cx + 1, cy);
        v[i][2] = p.w[i].nodal(cx + 1, cy + 1);
        v[i][3] = p.w[i].nodal(cx, cy + 1);
      }
      for (int qb = 0; qb < y.quad.npts; ++qb)
        for (int qa = 0; qa < y.quad.npts; ++qa) {
          double xi = y.quad.pt[qa], eta = y.quad.pt[qb];
          for (int i = 0; i < 3; ++i) {
            g[i] = {((1 - eta) * (v[i][1] - v[i][0]) + eta * (v[i][2] - v[i][3])) * inv_h,
                    ((1 - xi) * (v[i][3] - v[i][0]) + xi * (v[i][2] - v[i][1])) * inv_h};
          }
          CoeffSample cs = c.eval(x, y.qpoint(cx, cy, qa, qb));
          double w = y.qweight(qa, qb);
          for (int j = 0; j < 2; ++j) {
            Vec2 e = (j == 0) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
            Vec2 col = cs.A.apply(e + g[j]);
            a[0][j] += w * col.x;
            a[1][j] += w * col.y;
            double bj = (j == 0 ? cs.B.x : cs.B.y) + cs.B.dot(g[j]);
            (j == 0 ? b.x : b.y) += w * bj;
          }
          Vec2 cvec = cs.C + cs.A.apply(g[2]);
          cc += cvec * w;
          kk += w * (cs.k + cs.B.dot(g[2]));
        }
    }
  CoeffSample out;
  out.A = Mat2{a[0][0], a[0][1], a[1][0], a[1][1]};
  out.B = b;
  out.C = cc;
  out.k = kk;
  return out;
}

}  // namespace

const CoeffSample& EffectiveCoefficients::station(int cell, int qa, int qb) const {
  if (x_independent) return at[0];
  const int np = macro->quad.npts;
  return at[static_cast<std::size_t>(cell) * np * np + static_cast<std::size_t>(qb) * np + qa];
}

nlohmann::json EffectiveCoefficients::to_json() const {
  nlohmann::json j;
  j["x_independent"] = x_independent;
  j["alpha_declared"] = alpha_declared;
  j["beta_declared"] = beta_declared;
  j["profile_gradient_sum"] = grad_sum_max;
  j["alpha_measured"] = alpha_measured;
  j["beta_measured"] = beta_measured;
  auto entry = [](const CoeffSample& s) {
    return nlohmann::json{{"A", {s.A.a11, s.A.a12, s.A.a21, s.A.a22}},
                          {"B", {s.B.x, s.B.y}},
                          {"C", {s.C.x, s.C.y}},
                          {"k", s.k}};
  };
  if (x_independent) {
    j["value"] = entry(at[0]);
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : at) arr.push_back(entry(s));
    j["stations"] = std::move(arr);
  }
  return j;
}

EffectiveCoefficients assemble_effective(const TwoScaleCoefficient& c, const CorrectorSet& cs,
                                         const Grid& macro) {
  EffectiveCoefficients eff;
  eff.macro = &macro;
  eff.x_independent = c.periodic_only;
  eff.alpha_declared = c.alpha;
  eff.beta_declared = c.beta;
  eff.grad_sum_max = cs.grad_sum_max;
  const Grid& y = *cs.ygrid;

  if (eff.x_independent) {
    eff.at.push_back(effective_at(c, cs.station(0), y, {0.5, 0.5}));
  } else {
    std::size_t s = 0;
    for (int cell = 0; cell < macro.cells(); ++cell) {
      int cx = cell % macro.n, cy = cell / macro.n;
      for (int qb = 0; qb < macro.quad.npts; ++qb)
        for (int qa = 0; qa < macro.quad.npts; ++qa) {
          Vec2 x = macro.qpoint(cx, cy, qa, qb);
          eff.at.push_back(effective_at(c, cs.station(s), y, x));
          ++s;
        }
    }
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : eff.at)
    for (int k = 0; k < 64; ++k) {
      double th = PI * k / 64.0;
      Vec2 xi{std::cos(th), std::sin(th)};
      double q = s.A.quad(xi);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  eff.alpha_measured = lo;
  eff.beta_measured = hi;
  return eff;
}

std::pair<double, double> check_effective_ellipticity(const EffectiveCoefficients& eff) {
  double floor = eff.alpha_declared - 1e-9;
  double ceil = eff.beta_declared * (1.0 + eff.grad_sum_max) + 1e-6;
  if (eff.alpha_measured < floor)
    throw config_error("effective quadratic form dips to " + std::to_string(eff.alpha_measured) +
                       ", below the declared lower bound " + std::to_string(eff.alpha_declared));
  if (eff.beta_measured > ceil)
    throw config_error("effective quadratic form reaches " + std::to_string(eff.beta_measured) +
                       ", above the bound " + std::to_string(ceil) +
                       " (declared upper bound times 1 + profile-gradient sum)");
  return {eff.alpha_measured, eff.beta_measured};
}

AssembledForm assemble_effective_form(const Grid& g, const EffectiveCoefficients& eff,
                                      double lambda) {
  if (eff.x_independent) {
    CoeffSample s = eff.at[0];
    return assemble_sampler_form(g, [s](Vec2) { return s; }, lambda);
  }
  const Grid& mg = *eff.macro;
  if (g.n != mg.n || g.quad.npts != mg.quad.npts)
    throw config_error("station-tabulated effective coefficients require assembling on the grid "
                       "they were tabulated for");
  // Quadrature points are recovered from their physical coordinates: the cell
  // from the integer part, the per-direction point by nearest rule abscissa.
  auto sampler = [&mg, &eff](Vec2 x) -> CoeffSample {
    int cx = std::min(static_cast<int>(x.x * mg.n), mg.n - 1);
    int cy = std::min(static_cast<int>(x.y * mg.n), mg.n - 1);
    double fx = x.x * mg.n - cx, fy = x.y * mg.n - cy;
    int qa = 0, qb = 0;
    for (int q = 1; q < mg.quad.npts; ++q) {
      if (std::abs(mg.quad.pt[q] - fx) < std::abs(mg.quad.pt[qa] - fx)) qa = q;
      if (std::abs(mg.quad.pt[q] - fy) < std::abs(mg.quad.pt[qb] - fy)) qb = q;
    }
    return eff.station(cy * mg.n + cx, qa, qb);
  };
  return assemble_sampler_form(g, sampler, lambda);
}

double effective_index(const AssembledForm& eff_form, std::uint64_t seed) {
  Eigen::SparseMatrix<double> Esym = Eigen::SparseMatrix<double>(
      0.5 * (eff_form.E + Eigen::SparseMatrix<double>(eff_form.E.transpose())));
  Eigen::SparseMatrix<double> neg = Eigen::SparseMatrix<double>(-1.0 * Esym);
  return std::max(0.0, pencil_max_eig(neg, eff_form.M, seed)) * 1.05;
}

ScalarField solve_homogenized(const AssembledForm& eff_form, const ScalarField& f,
                              double index_bound, SolverOptions opts) {
  if (!(eff_form.lambda > index_bound))
    throw config_error("homogenized solve needs the shift above the effective lower-bound index: " +
                       std::to_string(eff_form.lambda) + " <= " + std::to_string(index_bound));
  ResolventOperator op(eff_form, opts);
  return op.apply(f);
}

}  // namespace homog
