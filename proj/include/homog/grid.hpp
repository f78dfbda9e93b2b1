#pragma once
/// @file grid.hpp
/// @brief Uniform tensor-product quadrilateral grids on the unit square with
///        bilinear elements, tensor Gauss quadrature, nodal fields, and the
///        quadrature-based norms every other module builds on.
///
/// Two grid kinds share one node layout ((n+1)^2 nodes, row major):
///  - dirichlet: homogeneous boundary data; degrees of freedom are the (n-1)^2
///    interior nodes, boundary values are identically zero.
///  - periodic:  opposite faces identified; degrees of freedom are the n^2
///    nodes with indices taken mod n.

#include <array>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "homog/common.hpp"

namespace homog {

enum class GridKind { dirichlet, periodic };

/// Tensor Gauss rule on [0,1] per direction. Order 2 is exact for degree 3
/// per direction (covers products of bilinear data); order 3 for degree 5
/// (useful for strongly oscillatory or singular coefficients).
struct QuadratureRule {
  int npts = 2;
  std::array<double, 3> pt{}, wt{};
  static QuadratureRule gauss(int order);
};

class Grid {
 public:
  Grid(GridKind kind, int n, int quad_order = 2);

  GridKind kind;
  int n;                ///< cells per side
  QuadratureRule quad;  ///< per-direction rule

  double h() const { return 1.0 / n; }
  int cells() const { return n * n; }
  int dof_count() const {
    return kind == GridKind::dirichlet ? (n - 1) * (n - 1) : n * n;
  }

  /// Degree of freedom of node (i,j), i,j in [0,n]. Returns -1 for boundary
  /// nodes of a dirichlet grid; wraps indices mod n on a periodic grid.
  int node_dof(int i, int j) const {
    if (kind == GridKind::dirichlet) {
      if (i <= 0 || j <= 0 || i >= n || j >= n) return -1;
      return (j - 1) * (n - 1) + (i - 1);
    }
    return (j % n) * n + (i % n);
  }

  Vec2 node_coord(int i, int j) const { return {i * h(), j * h()}; }

  /// Physical quadrature point qa,qb (per-direction indices) of cell (cx,cy).
  Vec2 qpoint(int cx, int cy, int qa, int qb) const {
    return {(cx + quad.pt[qa]) * h(), (cy + quad.pt[qb]) * h()};
  }
  /// Physical weight of quadrature point (qa,qb): cell area times rule weights.
  double qweight(int qa, int qb) const { return quad.wt[qa] * quad.wt[qb] * h() * h(); }
};

/// Bilinear shape values/derivatives on the reference cell [0,1]^2.
/// Local node order: (0,0), (1,0), (1,1), (0,1).
struct ShapeEval {
  std::array<double, 4> N;
  std::array<double, 4> dxi, deta;  // reference-coordinate derivatives
  static ShapeEval at(double xi, double eta) {
    ShapeEval s;
    s.N = {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
    s.dxi = {-(1 - eta), (1 - eta), eta, -eta};
    s.deta = {-(1 - xi), -xi, xi, (1 - xi)};
    return s;
  }
};

/// Nodal field over a grid's degrees of freedom. On dirichlet grids the
/// boundary trace is identically zero by construction.
class ScalarField {
 public:
  explicit ScalarField(const Grid& g) : grid(&g), v(Eigen::VectorXd::Zero(g.dof_count())) {}

  const Grid* grid;
  Eigen::VectorXd v;

  double nodal(int i, int j) const {
    int d = grid->node_dof(i, j);
    return d < 0 ? 0.0 : v[d];
  }

  /// Point evaluation of the bilinear interpolant. p is clamped to [0,1]^2.
  double eval(Vec2 p) const;
  /// Gradient of the interpolant at p (single-valued inside cells; at cell
  /// boundaries the lower-indexed cell is used).
  Vec2 grad(Vec2 p) const;
};

ScalarField interpolate(const Grid& g, const std::function<double(Vec2)>& f);

/// Independent N(0,1) values at every degree of freedom (rough basket fields).
ScalarField random_nodal_field(const Grid& g, std::uint64_t seed);

/// Random low-frequency sine/cosine combination rescaled so the largest nodal
/// magnitude equals target_sup. Smooth basket fields for pointwise checks.
ScalarField random_smooth_field(const Grid& g, std::uint64_t seed, double target_sup = 1.0);

// Quadrature functionals (OpenMP kernels with deterministic reductions).
double integrate(const ScalarField& u);
double l2_norm_sq(const ScalarField& u);
double l2_norm(const ScalarField& u);
double h1_seminorm_sq(const ScalarField& u);
double h1_seminorm(const ScalarField& u);

// Same functionals for the bilinear interpolant of f sampled at ALL nodes
// (boundary included, any grid kind). For data that is not zero-trace or
// periodic, e.g. affine functions.
double integrate(const Grid& g, const std::function<double(Vec2)>& f);
double l2_norm_sq(const Grid& g, const std::function<double(Vec2)>& f);
double h1_seminorm_sq(const Grid& g, const std::function<double(Vec2)>& f);
inline double h1_norm(const ScalarField& u) {
  return std::sqrt(l2_norm_sq(u) + h1_seminorm_sq(u));
}
double mean_value(const ScalarField& u);

/// Quadrature L2 distance between the interpolant and an exact function.
double l2_error(const ScalarField& u, const std::function<double(Vec2)>& exact);

/// ||u||_2 <= friedrichs_constant() * |u|_{1,2} for zero-trace fields
/// (smallest Laplace eigenvalue on the unit square is 2 pi^2).
inline double friedrichs_constant() { return 1.0 / (std::sqrt(2.0) * 3.14159265358979323846) + 1e-6; }

}  // namespace homog
