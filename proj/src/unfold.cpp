#include "homog/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace homog {

UnfoldPartition build_partition(double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw config_error("unfolding scale must lie in (0, 1], got " + std::to_string(delta));
  UnfoldPartition p;
  p.delta = delta;
  p.per_side = static_cast<int>(std::floor(1.0 / delta + 1e-12));
  double L = p.per_side * delta;
  p.area_covered = L * L;
  p.area_leftover = 1.0 - p.area_covered;
  return p;
}

bool UnfoldPartition::aligned_macro(const Grid& macro) const {
  double nd = macro.n * delta;
  return std::abs(nd - std::round(nd)) <= 1e-9 && std::round(nd) >= 1.0;
}

bool UnfoldPartition::aligned_micro(const Grid& macro, const Grid& micro) const {
  if (!aligned_macro(macro)) return false;
  long long nd = std::llround(macro.n * delta);
  return micro.n % nd == 0;
}

UnfoldedField::UnfoldedField(const UnfoldPartition& p, const Grid& g, int c)
    : part(p), ygrid(&g), comps(c) {
  vals.assign(static_cast<std::size_t>(p.cell_count()) * g.n * g.n * g.quad.npts * g.quad.npts *
                  static_cast<std::size_t>(c),
              0.0);
}

std::size_t UnfoldedField::index(int cell, int ycx, int ycy, int qa, int qb) const {
  const int m = ygrid->n, np = ygrid->quad.npts;
  return ((((static_cast<std::size_t>(cell) * m + ycy) * m + ycx) * np + qb) * np + qa) *
         static_cast<std::size_t>(comps);
}

double& UnfoldedField::at(int cell, int ycx, int ycy, int qa, int qb, int comp) {
  return vals[index(cell, ycx, ycy, qa, qb) + static_cast<std::size_t>(comp)];
}

double UnfoldedField::at(int cell, int ycx, int ycy, int qa, int qb, int comp) const {
  return vals[index(cell, ycx, ycy, qa, qb) + static_cast<std::size_t>(comp)];
}

double UnfoldedField::integral(int comp) const {
  const Grid& g = *ygrid;
  const double cell_measure = part.delta * part.delta;
  const std::size_t per_cell = static_cast<std::size_t>(g.n) * g.n;
  return parallel_sum(static_cast<std::size_t>(part.cell_count()) * per_cell, [&](std::size_t item) {
    int cell = static_cast<int>(item / per_cell);
    std::size_t yc = item % per_cell;
    int ycy = static_cast<int>(yc / g.n), ycx = static_cast<int>(yc % g.n);
    double s = 0.0;
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa)
        s += g.qweight(qa, qb) * at(cell, ycx, ycy, qa, qb, comp);
    return cell_measure * s;
  });
}

double UnfoldedField::l2_norm_sq() const {
  const Grid& g = *ygrid;
  const double cell_measure = part.delta * part.delta;
  const std::size_t per_cell = static_cast<std::size_t>(g.n) * g.n;
  return parallel_sum(static_cast<std::size_t>(part.cell_count()) * per_cell, [&](std::size_t item) {
    int cell = static_cast<int>(item / per_cell);
    std::size_t yc = item % per_cell;
    int ycy = static_cast<int>(yc / g.n), ycx = static_cast<int>(yc % g.n);
    double s = 0.0;
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        double sq = 0.0;
        for (int c = 0; c < comps; ++c) {
          double v = at(cell, ycx, ycy, qa, qb, c);
          sq += v * v;
        }
        s += g.qweight(qa, qb) * sq;
      }
    return cell_measure * s;
  });
}

namespace {

template <class Fill>
void fill_unfolded(UnfoldedField& w, Fill&& fill) {
  const Grid& g = *w.ygrid;
  const long long cells = w.part.cell_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long cell = 0; cell < cells; ++cell) {
    Vec2 corner = w.part.corner(static_cast<int>(cell));
    for (int ycy = 0; ycy < g.n; ++ycy)
      for (int ycx = 0; ycx < g.n; ++ycx)
        for (int qb = 0; qb < g.quad.npts; ++qb)
          for (int qa = 0; qa < g.quad.npts; ++qa) {
            Vec2 y = g.qpoint(ycx, ycy, qa, qb);
            Vec2 phys = corner + y * w.part.delta;
            fill(static_cast<int>(cell), ycx, ycy, qa, qb, phys);
          }
  }
}

}  // namespace

UnfoldedField unfold_callable(const std::function<double(Vec2)>& f, const UnfoldPartition& p,
                              const Grid& ygrid) {
  UnfoldedField w(p, ygrid, 1);
  fill_unfolded(w, [&](int cell, int ycx, int ycy, int qa, int qb, Vec2 phys) {
    w.at(cell, ycx, ycy, qa, qb, 0) = f(phys);
  });
  return w;
}

UnfoldedField unfold(const ScalarField& u, const UnfoldPartition& p, const Grid& ygrid) {
  UnfoldedField w(p, ygrid, 1);
  fill_unfolded(w, [&](int cell, int ycx, int ycy, int qa, int qb, Vec2 phys) {
    w.at(cell, ycx, ycy, qa, qb, 0) = u.eval(phys);
  });
  return w;
}

UnfoldedField unfold_gradient(const ScalarField& u, const UnfoldPartition& p, const Grid& ygrid) {
  UnfoldedField w(p, ygrid, 2);
  fill_unfolded(w, [&](int cell, int ycx, int ycy, int qa, int qb, Vec2 phys) {
    Vec2 g = u.grad(phys);
    w.at(cell, ycx, ycy, qa, qb, 0) = g.x;
    w.at(cell, ycx, ycy, qa, qb, 1) = g.y;
  });
  return w;
}

double CellwiseField::eval(Vec2 x) const {
  int i = static_cast<int>(std::floor(x.x / part.delta));
  int j = static_cast<int>(std::floor(x.y / part.delta));
  if (i < 0 || j < 0 || i >= part.per_side || j >= part.per_side) return 0.0;
  return value[static_cast<std::size_t>(j) * part.per_side + i];
}

double CellwiseField::integral() const {
  double s = 0.0;
  for (double v : value) s += v;
  return s * part.delta * part.delta;
}

CellwiseField mean_over_Y(const UnfoldedField& w) {
  if (w.comps != 1) throw config_error("Y-mean is defined for scalar unfolded fields");
  const Grid& g = *w.ygrid;
  CellwiseField out;
  out.part = w.part;
  out.value.assign(static_cast<std::size_t>(w.part.cell_count()), 0.0);
  for (int cell = 0; cell < w.part.cell_count(); ++cell) {
    double s = 0.0;
    for (int ycy = 0; ycy < g.n; ++ycy)
      for (int ycx = 0; ycx < g.n; ++ycx)
        for (int qb = 0; qb < g.quad.npts; ++qb)
          for (int qa = 0; qa < g.quad.npts; ++qa)
            s += g.qweight(qa, qb) * w.at(cell, ycx, ycy, qa, qb, 0);
    out.value[static_cast<std::size_t>(cell)] = s;  // |Y| = 1
  }
  return out;
}

double check_integral_identity(const ScalarField& u, const UnfoldPartition& p, const Grid& ygrid) {
  double lhs = unfold(u, p, ygrid).integral(0);

  // Exact integral of the bilinear interpolant over the covered square
  // [0, L]^2: over any axis-aligned rectangle the midpoint rule is exact.
  const Grid& g = *u.grid;
  const double L = p.per_side * p.delta;
  const double h = g.h();
  double rhs = 0.0;
  for (int cy = 0; cy < g.n; ++cy) {
    double y0 = cy * h, y1 = std::min((cy + 1) * h, L);
    if (y1 <= y0) continue;
    for (int cx = 0; cx < g.n; ++cx) {
      double x0 = cx * h, x1 = std::min((cx + 1) * h, L);
      if (x1 <= x0) continue;
      rhs += (x1 - x0) * (y1 - y0) * u.eval({0.5 * (x0 + x1), 0.5 * (y0 + y1)});
    }
  }
  return std::abs(lhs - rhs);
}

TwoScaleReconstruction::TwoScaleReconstruction(const ScalarField& u0, const CorrectorSet& cs)
    : u0_(&u0), cs_(&cs) {
  if (!cs.x_independent)
    throw config_error("two-scale reconstruction needs x-independent cell profiles "
                       "(station-tabulated profiles are not interpolated)");
}

double TwoScaleReconstruction::value(Vec2 x, Vec2 y) const {
  const CellProfiles& p = cs_->at[0];
  Vec2 g0 = u0_->grad(x);
  return u0_->eval(x) * p.w[2].eval(y) + g0.x * p.w[0].eval(y) + g0.y * p.w[1].eval(y);
}

Vec2 TwoScaleReconstruction::grad_y(Vec2 x, Vec2 y) const {
  const CellProfiles& p = cs_->at[0];
  Vec2 g0 = u0_->grad(x);
  Vec2 gw0 = p.w[2].grad(y), gw1 = p.w[0].grad(y), gw2 = p.w[1].grad(y);
  return gw0 * u0_->eval(x) + gw1 * g0.x + gw2 * g0.y;
}

namespace {

/// Gradients of the three profiles (w_1, w_2, w_0 in slots 0,1,2 matching the
/// x-weights du0/dx1, du0/dx2, u0) tabulated at the unit-cell quadrature points.
struct ProfileTable {
  const Grid* y;
  std::vector<double> gx[3], gy[3];
  double gram[3][3]{};  // int_Y V_j . V_k
  Vec2 mean[3]{};       // int_Y V_j

  explicit ProfileTable(const CorrectorSet& cs) : y(cs.ygrid) {
    const Grid& g = *y;
    const int np = g.quad.npts;
    const std::size_t total = static_cast<std::size_t>(g.n) * g.n * np * np;
    const CellProfiles& p = cs.at[0];
    const int order[3] = {0, 1, 2};  // w[0]=w_1, w[1]=w_2, w[2]=w_0
    for (int j = 0; j < 3; ++j) {
      gx[j].resize(total);
      gy[j].resize(total);
      const ScalarField& w = p.w[order[j]];
      const double inv_h = static_cast<double>(g.n);
      std::size_t idx = 0;
      for (int cy = 0; cy < g.n; ++cy)
        for (int cx = 0; cx < g.n; ++cx) {
          double v00 = w.nodal(cx, cy), v10 = w.nodal(cx + 1, cy);
          double v11 = w.nodal(cx + 1, cy + 1), v01 = w.nodal(cx, cy + 1);
          for (int qb = 0; qb < np; ++qb)
            for (int qa = 0; qa < np; ++qa, ++idx) {
              double xi = g.quad.pt[qa], eta = g.quad.pt[qb];
              gx[j][idx] = ((1 - eta) * (v10 - v00) + eta * (v11 - v01)) * inv_h;
              gy[j][idx] = ((1 - xi) * (v01 - v00) + xi * (v11 - v10)) * inv_h;
            }
        }
    }
    std::size_t idx = 0;
    for (int cy = 0; cy < g.n; ++cy)
      for (int cx = 0; cx < g.n; ++cx)
        for (int qb = 0; qb < np; ++qb)
          for (int qa = 0; qa < np; ++qa, ++idx) {
            double w = g.qweight(qa, qb);
            for (int j = 0; j < 3; ++j) {
              mean[j] += Vec2{gx[j][idx], gy[j][idx]} * w;
              for (int k = 0; k < 3; ++k)
                gram[j][k] += w * (gx[j][idx] * gx[k][idx] + gy[j][idx] * gy[k][idx]);
            }
          }
  }

  /// Slot weights at a macro point: (du0/dx1, du0/dx2, u0).
  static void weights(const ScalarField& u0, Vec2 x, double s[3]) {
    Vec2 g = u0.grad(x);
    s[0] = g.x;
    s[1] = g.y;
    s[2] = u0.eval(x);
  }
};

/// Pointwise value of int_Y |grad u0(x) + sum_j s_j V_j|^2 dy.
double p2_pointwise(const ProfileTable& t, const double s[3]) {
  double gsq = s[0] * s[0] + s[1] * s[1];
  double cross = 0.0, quad = 0.0;
  for (int j = 0; j < 3; ++j) {
    cross += s[j] * (s[0] * t.mean[j].x + s[1] * t.mean[j].y);
    for (int k = 0; k < 3; ++k) quad += s[j] * s[k] * t.gram[j][k];
  }
  return gsq + 2.0 * cross + quad;
}

}  // namespace

double two_scale_error(const ScalarField& u_delta, const TwoScaleReconstruction& rec,
                       const UnfoldPartition& p, const Grid& ygrid) {
  const Grid& macro = *u_delta.grid;
  const ScalarField& u0 = rec.u0();
  if (u0.grid->n != macro.n)
    throw config_error("two-scale error needs the oscillating and homogenized solutions on the "
                       "same macro grid");
  if (rec.profiles().ygrid->n != ygrid.n || rec.profiles().ygrid->quad.npts != ygrid.quad.npts)
    throw config_error("two-scale error needs the cell profiles on the unfolding unit-cell grid");
  if (!(p.aligned_macro(macro) && p.aligned_micro(macro, ygrid)))
    return two_scale_error_reference(u_delta, rec, p, ygrid);

  const ProfileTable table(rec.profiles());
  const int nd = static_cast<int>(std::llround(macro.n * p.delta));  // macro cells per delta-cell side
  const int np = ygrid.quad.npts;

  // ||T||^2 over covered x Y.
  UnfoldedField T = unfold_gradient(u_delta, p, ygrid);
  double t2 = T.l2_norm_sq();

  // <T, P> per delta-cell: y-moments of T against (1, V_j), x-integrals of the
  // slot weights over the delta-cell (macro-cell Gauss, exact).
  double cross = parallel_sum(static_cast<std::size_t>(p.cell_count()), [&](std::size_t cell) {
    double tvx = 0.0, tvy = 0.0, tdot[3] = {0.0, 0.0, 0.0};
    std::size_t idx = 0;
    for (int ycy = 0; ycy < ygrid.n; ++ycy)
      for (int ycx = 0; ycx < ygrid.n; ++ycx)
        for (int qb = 0; qb < np; ++qb)
          for (int qa = 0; qa < np; ++qa, ++idx) {
            double w = ygrid.qweight(qa, qb);
            double tx = T.at(static_cast<int>(cell), ycx, ycy, qa, qb, 0);
            double ty = T.at(static_cast<int>(cell), ycx, ycy, qa, qb, 1);
            tvx += w * tx;
            tvy += w * ty;
            for (int j = 0; j < 3; ++j)
              tdot[j] += w * (tx * table.gx[j][idx] + ty * table.gy[j][idx]);
          }

    double is[3] = {0.0, 0.0, 0.0};
    int bx = static_cast<int>(cell) % p.per_side * nd;
    int by = static_cast<int>(cell) / p.per_side * nd;
    for (int my = by; my < by + nd; ++my)
      for (int mx = bx; mx < bx + nd; ++mx)
        for (int qb = 0; qb < macro.quad.npts; ++qb)
          for (int qa = 0; qa < macro.quad.npts; ++qa) {
            double s[3];
            ProfileTable::weights(u0, macro.qpoint(mx, my, qa, qb), s);
            double w = macro.qweight(qa, qb);
            for (int j = 0; j < 3; ++j) is[j] += w * s[j];
          }
    return is[0] * tvx + is[1] * tvy + is[0] * tdot[0] + is[1] * tdot[1] + is[2] * tdot[2];
  });

  // int_{D x Y} |P|^2 over every macro cell (covered and leftover alike).
  double p2 = parallel_sum(static_cast<std::size_t>(macro.cells()), [&](std::size_t cidx) {
    int cx = static_cast<int>(cidx) % macro.n, cy = static_cast<int>(cidx) / macro.n;
    double acc = 0.0;
    for (int qb = 0; qb < macro.quad.npts; ++qb)
      for (int qa = 0; qa < macro.quad.npts; ++qa) {
        double s[3];
        ProfileTable::weights(u0, macro.qpoint(cx, cy, qa, qb), s);
        acc += macro.qweight(qa, qb) * p2_pointwise(table, s);
      }
    return acc;
  });

  double err_sq = t2 - 2.0 * cross + p2;
  return std::sqrt(std::max(0.0, err_sq));
}

double two_scale_error_reference(const ScalarField& u_delta, const TwoScaleReconstruction& rec,
                                 const UnfoldPartition& p, const Grid& ygrid) {
  const Grid& macro = *u_delta.grid;
  const ScalarField& u0 = rec.u0();
  if (u0.grid->n != macro.n)
    throw config_error("two-scale error needs the oscillating and homogenized solutions on the "
                       "same macro grid");
  const double h = macro.h();
  const double L = p.per_side * p.delta;

  // Covered region: nested x-quadrature (macro-cell pieces intersected with
  // each delta-cell) times y-quadrature.
  double covered = parallel_sum(static_cast<std::size_t>(p.cell_count()), [&](std::size_t cell) {
    Vec2 corner = p.corner(static_cast<int>(cell));
    double x_lo = corner.x, x_hi = corner.x + p.delta;
    double y_lo = corner.y, y_hi = corner.y + p.delta;
    int mx0 = std::max(0, static_cast<int>(std::floor(x_lo / h)));
    int my0 = std::max(0, static_cast<int>(std::floor(y_lo / h)));
    int mx1 = std::min(macro.n - 1, static_cast<int>(std::ceil(x_hi / h)) - 1);
    int my1 = std::min(macro.n - 1, static_cast<int>(std::ceil(y_hi / h)) - 1);
    double acc = 0.0;
    for (int my = my0; my <= my1; ++my) {
      double b0 = std::max(y_lo, my * h), b1 = std::min(y_hi, (my + 1) * h);
      if (b1 <= b0) continue;
      for (int mx = mx0; mx <= mx1; ++mx) {
        double a0 = std::max(x_lo, mx * h), a1 = std::min(x_hi, (mx + 1) * h);
        if (a1 <= a0) continue;
        for (int xqb = 0; xqb < macro.quad.npts; ++xqb)
          for (int xqa = 0; xqa < macro.quad.npts; ++xqa) {
            Vec2 x{a0 + (a1 - a0) * macro.quad.pt[xqa], b0 + (b1 - b0) * macro.quad.pt[xqb]};
            double wx = macro.quad.wt[xqa] * macro.quad.wt[xqb] * (a1 - a0) * (b1 - b0);
            Vec2 g0 = u0.grad(x);
            double inner = 0.0;
            for (int ycy = 0; ycy < ygrid.n; ++ycy)
              for (int ycx = 0; ycx < ygrid.n; ++ycx)
                for (int qb = 0; qb < ygrid.quad.npts; ++qb)
                  for (int qa = 0; qa < ygrid.quad.npts; ++qa) {
                    Vec2 y = ygrid.qpoint(ycx, ycy, qa, qb);
                    Vec2 t = u_delta.grad(corner + y * p.delta);
                    Vec2 pt = g0 + rec.grad_y(x, y);
                    inner += ygrid.qweight(qa, qb) * (t - pt).norm_sq();
                  }
            acc += wx * inner;
          }
      }
    }
    return acc;
  });

  // Leftover strip: |grad u0 + grad_y u1|^2 against zero unfolded data.
  double leftover = parallel_sum(static_cast<std::size_t>(macro.cells()), [&](std::size_t cidx) {
    int cx = static_cast<int>(cidx) % macro.n, cy = static_cast<int>(cidx) / macro.n;
    double x0 = cx * h, x1 = (cx + 1) * h, y0 = cy * h, y1 = (cy + 1) * h;
    double acc = 0.0;
    // Intersections of the cell with {x > L} and {x <= L, y > L}.
    const double rects[2][4] = {{std::max(x0, L), x1, y0, y1},
                                {x0, std::min(x1, L), std::max(y0, L), y1}};
    for (const auto& r : rects) {
      double a0 = r[0], a1 = r[1], b0 = r[2], b1 = r[3];
      if (a1 <= a0 || b1 <= b0) continue;
      for (int xqb = 0; xqb < macro.quad.npts; ++xqb)
        for (int xqa = 0; xqa < macro.quad.npts; ++xqa) {
          Vec2 x{a0 + (a1 - a0) * macro.quad.pt[xqa], b0 + (b1 - b0) * macro.quad.pt[xqb]};
          double wx = macro.quad.wt[xqa] * macro.quad.wt[xqb] * (a1 - a0) * (b1 - b0);
          Vec2 g0 = u0.grad(x);
          double inner = 0.0;
          for (int ycy = 0; ycy < ygrid.n; ++ycy)
            for (int ycx = 0; ycx < ygrid.n; ++ycx)
              for (int qb = 0; qb < ygrid.quad.npts; ++qb)
                for (int qa = 0; qa < ygrid.quad.npts; ++qa) {
                  Vec2 y = ygrid.qpoint(ycx, ycy, qa, qb);
                  Vec2 pt = g0 + rec.grad_y(x, y);
                  inner += ygrid.qweight(qa, qb) * pt.norm_sq();
                }
          acc += wx * inner;
        }
    }
    return acc;
  });

  return std::sqrt(std::max(0.0, covered + leftover));
}

}  // namespace homog
