#include "homog/cell.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

namespace homog {

void normalize_mean_zero(ScalarField& w) {
  if (w.grid->kind != GridKind::periodic)
    throw config_error("mean-zero normalization is defined on periodic grids");
  double mean = integrate(w);  // |Y| = 1
  w.v.array() -= mean;
}

ScalarField solve_cell_raw(const Grid& ygrid, const PointSampler& a_only, const Eigen::VectorXd& rhs,
                           int pin, double* residual_out) {
  if (ygrid.kind != GridKind::periodic)
    throw config_error("cell problems are posed on periodic grids");
  if (pin < 0 || pin >= ygrid.dof_count())
    throw config_error("pinned degree of freedom " + std::to_string(pin) + " out of range");

  ScalarField w(ygrid);
  if (residual_out) *residual_out = 0.0;
  if (rhs.size() != ygrid.dof_count())
    throw config_error("cell right-hand side has " + std::to_string(rhs.size()) + " entries, expected " +
                       std::to_string(ygrid.dof_count()));
  double linf = rhs.cwiseAbs().maxCoeff();
  if (linf <= 1e-13) return w;  // rhs vanishes to roundoff: kernel representative 0

  double total = rhs.sum();
  double l1 = rhs.cwiseAbs().sum();
  if (std::abs(total) > 1e-10 * l1)
    throw config_error("cell right-hand side incompatible with the constant kernel: sum " +
                       std::to_string(total) + " vs L1 mass " + std::to_string(l1));

  Eigen::SparseMatrix<double> S = assemble_matrix(ygrid, a_only);

  // Pin one degree of freedom: replace its equation by w[pin] = 0. The other
  // equations keep their coupling to the pinned node; since the kernel is the
  // constants and the rhs is compatible, the solution is the representative
  // vanishing at the pin.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(S.nonZeros()) + 1);
  for (int kcol = 0; kcol < S.outerSize(); ++kcol)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, kcol); it; ++it)
      if (it.row() != pin) trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  trips.emplace_back(pin, pin, 1.0);
  Eigen::SparseMatrix<double> Sp(ygrid.dof_count(), ygrid.dof_count());
  Sp.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd b = rhs;
  b[pin] = 0.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Sp);
  if (lu.info() != Eigen::Success)
    throw solver_error("cell system factorization failed (kernel larger than the constants?)");
  w.v = lu.solve(b);

  double rel = (Sp * w.v - b).norm() / b.norm();
  if (residual_out) *residual_out = rel;
  if (!(rel <= 1e-10))
    throw solver_error("cell solve missed tolerance: relative residual " + std::to_string(rel));
  return w;
}

namespace {

PointSampler diffusion_only(const TwoScaleCoefficient& c, Vec2 x) {
  return [&c, x](Vec2 y) {
    CoeffSample out;
    out.A = c.eval(x, y).A;
    return out;
  };
}

ScalarField directional_profile(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x, int dir,
                                double* residual_out) {
  Vec2 e = (dir == 0) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  Eigen::VectorXd rhs =
      -assemble_gradient_load(ygrid, [&c, x, e](Vec2 y) { return c.eval(x, y).A.apply(e); });
  ScalarField w = solve_cell_raw(ygrid, diffusion_only(c, x), rhs, 0, residual_out);
  normalize_mean_zero(w);
  return w;
}

ScalarField drift_profile(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x,
                          double* residual_out) {
  Eigen::VectorXd rhs = -assemble_gradient_load(ygrid, [&c, x](Vec2 y) { return c.eval(x, y).C; });
  ScalarField w = solve_cell_raw(ygrid, diffusion_only(c, x), rhs, 0, residual_out);
  normalize_mean_zero(w);
  return w;
}

CellProfiles profiles_at(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x) {
  CellProfiles p(ygrid);
  double res = 0.0, worst = 0.0;
  for (int dir = 0; dir < 2; ++dir) {
    p.w[dir] = directional_profile(ygrid, c, x, dir, &res);
    worst = std::max(worst, res);
  }
  p.w[2] = drift_profile(ygrid, c, x, &res);
  worst = std::max(worst, res);
  for (int i = 0; i < 3; ++i) p.grad_norm[i] = h1_seminorm(p.w[i]);
  p.residual = worst;
  return p;
}

/// Component-summed p0-norms of the test-side drift:
/// (sum_i ||c_i(x, .)||_{p0}^2)^{1/2} by unit-cell quadrature.
double drift_lp_norm_sum(const TwoScaleCoefficient& c, const Grid& ygrid, Vec2 x) {
  double m1 = 0.0, m2 = 0.0;
  for (int cy = 0; cy < ygrid.n; ++cy)
    for (int cx = 0; cx < ygrid.n; ++cx)
      for (int qb = 0; qb < ygrid.quad.npts; ++qb)
        for (int qa = 0; qa < ygrid.quad.npts; ++qa) {
          Vec2 C = c.eval(x, ygrid.qpoint(cx, cy, qa, qb)).C;
          double w = ygrid.qweight(qa, qb);
          m1 += w * std::pow(std::abs(C.x), c.p0);
          m2 += w * std::pow(std::abs(C.y), c.p0);
        }
  double n1 = std::pow(m1, 1.0 / c.p0), n2 = std::pow(m2, 1.0 / c.p0);
  return std::sqrt(n1 * n1 + n2 * n2);
}

/// Same with the essential sup taken from declared data when p0 is infinite:
/// ||c_i||_{p0} on the probability cell is bounded by ||c_i||_inf.
double drift_norm_sum(const TwoScaleCoefficient& c, const Grid& ygrid, Vec2 x) {
  if (std::isfinite(c.p0)) return drift_lp_norm_sum(c, ygrid, x);
  return std::sqrt(2.0) * c.sup_c;
}

}  // namespace

ScalarField solve_cell_directional(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x, int dir) {
  if (dir != 0 && dir != 1) throw config_error("direction must be 0 or 1, got " + std::to_string(dir));
  return directional_profile(ygrid, c, x, dir, nullptr);
}

ScalarField solve_cell_drift(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x) {
  return drift_profile(ygrid, c, x, nullptr);
}

CorrectorSet solve_correctors(const Grid& ygrid, const TwoScaleCoefficient& c,
                              const Grid* macro_for_stations) {
  CorrectorSet set;
  set.ygrid = &ygrid;
  set.x_independent = c.periodic_only || c.separable_scalar;

  if (set.x_independent) {
    set.at.push_back(profiles_at(ygrid, c, {0.5, 0.5}));
  } else {
    if (!macro_for_stations)
      throw config_error("coefficient family '" + c.name +
                         "' depends on the macroscopic variable; cell profiles need the macro grid "
                         "for quadrature stations");
    const Grid& g = *macro_for_stations;
    for (int cell = 0; cell < g.cells(); ++cell) {
      int cx = cell % g.n, cy = cell / g.n;
      for (int qb = 0; qb < g.quad.npts; ++qb)
        for (int qa = 0; qa < g.quad.npts; ++qa) {
          Vec2 x = g.qpoint(cx, cy, qa, qb);
          set.x_stations.push_back(x);
          set.at.push_back(profiles_at(ygrid, c, x));
        }
    }
    // Collapse to a shared profile set when the stations coincide anyway
    // (e.g. macro-varying drift that is constant in y solves to zero).
    bool all_equal = true;
    for (std::size_t s = 1; s < set.at.size() && all_equal; ++s)
      for (int i = 0; i < 3 && all_equal; ++i)
        if ((set.at[s].w[i].v - set.at[0].w[i].v).cwiseAbs().maxCoeff() > 1e-12) all_equal = false;
    if (all_equal) {
      CellProfiles shared = set.at[0];
      set.at.clear();
      set.at.push_back(std::move(shared));
      set.x_stations.clear();
      set.x_independent = true;
    }
  }

  double bound = 0.0, gsum = 0.0;
  std::vector<Vec2> xs = set.x_independent ? std::vector<Vec2>{{0.5, 0.5}} : set.x_stations;
  for (std::size_t s = 0; s < set.at.size(); ++s) {
    const CellProfiles& p = set.at[s];
    gsum = std::max(gsum, p.grad_norm[0] + p.grad_norm[1]);
    Vec2 x = set.x_independent ? Vec2{0.5, 0.5} : xs[s];
    bound = std::max(bound, drift_norm_sum(c, ygrid, x) / c.alpha);
  }
  set.grad_sum_max = gsum;
  set.drift_grad_bound = bound;
  return set;
}

}  // namespace homog
