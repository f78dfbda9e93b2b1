#include "homog/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace homog {

QuadratureRule QuadratureRule::gauss(int order) {
  QuadratureRule r;
  if (order == 2) {
    const double d = 0.5 / std::sqrt(3.0);
    r.npts = 2;
    r.pt = {0.5 - d, 0.5 + d, 0.0};
    r.wt = {0.5, 0.5, 0.0};
  } else if (order == 3) {
    const double d = 0.5 * std::sqrt(0.6);
    r.npts = 3;
    r.pt = {0.5 - d, 0.5, 0.5 + d};
    r.wt = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  } else {
    throw config_error("quadrature order must be 2 or 3, got " + std::to_string(order));
  }
  return r;
}

Grid::Grid(GridKind kind_, int n_, int quad_order) : kind(kind_), n(n_), quad(QuadratureRule::gauss(quad_order)) {
  if (kind == GridKind::dirichlet && n < 2)
    throw config_error("dirichlet grid needs n >= 2 (no interior DOF at n = " + std::to_string(n) + ")");
  if (kind == GridKind::periodic && n < 1)
    throw config_error("periodic grid needs n >= 1, got n = " + std::to_string(n));
}

namespace {

struct CellLocate {
  int cx, cy;
  double xi, eta;
};

inline CellLocate locate(const Grid& g, Vec2 p) {
  double X = std::clamp(p.x, 0.0, 1.0) * g.n;
  double Y = std::clamp(p.y, 0.0, 1.0) * g.n;
  int cx = std::min(static_cast<int>(X), g.n - 1);
  int cy = std::min(static_cast<int>(Y), g.n - 1);
  return {cx, cy, X - cx, Y - cy};
}

/// Per-cell quadrature accumulation over the whole grid with a deterministic
/// parallel reduction. fn(cx, cy) returns the cell's contribution.
template <class CellFn>
double cell_sum(const Grid& g, CellFn&& fn) {
  return parallel_sum(static_cast<std::size_t>(g.cells()),
                      [&](std::size_t c) { return fn(static_cast<int>(c % g.n), static_cast<int>(c / g.n)); });
}

/// Shared quadrature kernels over an arbitrary nodal accessor nod(i, j).
template <class Nodal>
double integrate_impl(const Grid& g, Nodal&& nod) {
  return cell_sum(g, [&](int cx, int cy) {
    double s = 0.0;
    double v00 = nod(cx, cy), v10 = nod(cx + 1, cy);
    double v11 = nod(cx + 1, cy + 1), v01 = nod(cx, cy + 1);
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        double val = sh.N[0] * v00 + sh.N[1] * v10 + sh.N[2] * v11 + sh.N[3] * v01;
        s += g.qweight(qa, qb) * val;
      }
    return s;
  });
}

template <class Nodal>
double l2_norm_sq_impl(const Grid& g, Nodal&& nod) {
  return cell_sum(g, [&](int cx, int cy) {
    double s = 0.0;
    double v00 = nod(cx, cy), v10 = nod(cx + 1, cy);
    double v11 = nod(cx + 1, cy + 1), v01 = nod(cx, cy + 1);
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        double val = sh.N[0] * v00 + sh.N[1] * v10 + sh.N[2] * v11 + sh.N[3] * v01;
        s += g.qweight(qa, qb) * val * val;
      }
    return s;
  });
}

template <class Nodal>
double h1_seminorm_sq_impl(const Grid& g, Nodal&& nod) {
  const double inv_h = static_cast<double>(g.n);
  return cell_sum(g, [&](int cx, int cy) {
    double s = 0.0;
    double v00 = nod(cx, cy), v10 = nod(cx + 1, cy);
    double v11 = nod(cx + 1, cy + 1), v01 = nod(cx, cy + 1);
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        double xi = g.quad.pt[qa], eta = g.quad.pt[qb];
        double gx = ((1 - eta) * (v10 - v00) + eta * (v11 - v01)) * inv_h;
        double gy = ((1 - xi) * (v01 - v00) + xi * (v11 - v10)) * inv_h;
        s += g.qweight(qa, qb) * (gx * gx + gy * gy);
      }
    return s;
  });
}

/// Sample f at every node (boundary included) for the callable overloads.
std::vector<double> sample_all_nodes(const Grid& g, const std::function<double(Vec2)>& f) {
  std::vector<double> vals(static_cast<std::size_t>(g.n + 1) * (g.n + 1));
  for (int j = 0; j <= g.n; ++j)
    for (int i = 0; i <= g.n; ++i) vals[static_cast<std::size_t>(j) * (g.n + 1) + i] = f(g.node_coord(i, j));
  return vals;
}

}  // namespace

double ScalarField::eval(Vec2 p) const {
  const Grid& g = *grid;
  auto [cx, cy, xi, eta] = locate(g, p);
  double v00 = nodal(cx, cy), v10 = nodal(cx + 1, cy);
  double v11 = nodal(cx + 1, cy + 1), v01 = nodal(cx, cy + 1);
  return (1 - xi) * (1 - eta) * v00 + xi * (1 - eta) * v10 + xi * eta * v11 + (1 - xi) * eta * v01;
}

Vec2 ScalarField::grad(Vec2 p) const {
  const Grid& g = *grid;
  auto [cx, cy, xi, eta] = locate(g, p);
  double v00 = nodal(cx, cy), v10 = nodal(cx + 1, cy);
  double v11 = nodal(cx + 1, cy + 1), v01 = nodal(cx, cy + 1);
  double inv_h = static_cast<double>(g.n);
  double gx = ((1 - eta) * (v10 - v00) + eta * (v11 - v01)) * inv_h;
  double gy = ((1 - xi) * (v01 - v00) + xi * (v11 - v10)) * inv_h;
  return {gx, gy};
}

ScalarField interpolate(const Grid& g, const std::function<double(Vec2)>& f) {
  ScalarField u(g);
  int lo = (g.kind == GridKind::dirichlet) ? 1 : 0;
  for (int j = lo; j <= g.n - 1; ++j)
    for (int i = lo; i <= g.n - 1; ++i) u.v[g.node_dof(i, j)] = f(g.node_coord(i, j));
  return u;
}

ScalarField random_nodal_field(const Grid& g, std::uint64_t seed) {
  Rng rng(seed);
  ScalarField u(g);
  for (int i = 0; i < u.v.size(); ++i) u.v[i] = rng.gaussian();
  return u;
}

ScalarField random_smooth_field(const Grid& g, std::uint64_t seed, double target_sup) {
  Rng rng(seed);
  constexpr int modes = 3;
  double a[modes][modes];
  for (auto& row : a)
    for (double& c : row) c = rng.gaussian();
  const double pi = 3.14159265358979323846;
  auto f = [&](Vec2 p) {
    double s = 0.0;
    for (int q = 0; q < modes; ++q)
      for (int r = 0; r < modes; ++r) {
        if (g.kind == GridKind::dirichlet) {
          s += a[q][r] * std::sin((q + 1) * pi * p.x) * std::sin((r + 1) * pi * p.y);
        } else {
          s += a[q][r] * std::sin(2 * (q + 1) * pi * p.x + 0.3 * r) *
               std::cos(2 * (r + 1) * pi * p.y + 0.7 * q);
        }
      }
    return s;
  };
  ScalarField u = interpolate(g, f);
  double sup = u.v.cwiseAbs().maxCoeff();
  if (sup > 0) u.v *= target_sup / sup;
  return u;
}

double integrate(const ScalarField& u) {
  return integrate_impl(*u.grid, [&](int i, int j) { return u.nodal(i, j); });
}

double l2_norm_sq(const ScalarField& u) {
  return l2_norm_sq_impl(*u.grid, [&](int i, int j) { return u.nodal(i, j); });
}

double h1_seminorm_sq(const ScalarField& u) {
  return h1_seminorm_sq_impl(*u.grid, [&](int i, int j) { return u.nodal(i, j); });
}

double l2_norm(const ScalarField& u) { return std::sqrt(l2_norm_sq(u)); }
double h1_seminorm(const ScalarField& u) { return std::sqrt(h1_seminorm_sq(u)); }

double mean_value(const ScalarField& u) { return integrate(u); }  // |D| = |Y| = 1

double integrate(const Grid& g, const std::function<double(Vec2)>& f) {
  auto vals = sample_all_nodes(g, f);
  return integrate_impl(g, [&](int i, int j) { return vals[static_cast<std::size_t>(j) * (g.n + 1) + i]; });
}

double l2_norm_sq(const Grid& g, const std::function<double(Vec2)>& f) {
  auto vals = sample_all_nodes(g, f);
  return l2_norm_sq_impl(g, [&](int i, int j) { return vals[static_cast<std::size_t>(j) * (g.n + 1) + i]; });
}

double h1_seminorm_sq(const Grid& g, const std::function<double(Vec2)>& f) {
  auto vals = sample_all_nodes(g, f);
  return h1_seminorm_sq_impl(g, [&](int i, int j) { return vals[static_cast<std::size_t>(j) * (g.n + 1) + i]; });
}

double l2_error(const ScalarField& u, const std::function<double(Vec2)>& exact) {
  const Grid& g = *u.grid;
  double s = cell_sum(g, [&](int cx, int cy) {
    double acc = 0.0;
    double v00 = u.nodal(cx, cy), v10 = u.nodal(cx + 1, cy);
    double v11 = u.nodal(cx + 1, cy + 1), v01 = u.nodal(cx, cy + 1);
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        double val = sh.N[0] * v00 + sh.N[1] * v10 + sh.N[2] * v11 + sh.N[3] * v01;
        double d = val - exact(g.qpoint(cx, cy, qa, qb));
        acc += g.qweight(qa, qb) * d * d;
      }
    return acc;
  });
  return std::sqrt(s);
}

}  // namespace homog
