#pragma once
/// @file unfold.hpp
/// @brief Discrete periodic unfolding: T_delta(u)(x,y) = u(delta [x/delta] + delta y)
///        on the union of whole delta-cells inside the unit square (zero on the
///        leftover boundary strip), sampled on a unit-cell grid's quadrature
///        points. Provides the integral identity, Y-mean, the first-order
///        two-scale reconstruction, and the two-scale gradient error.

#include <cstdint>
#include <functional>
#include <vector>

#include "homog/cell.hpp"
#include "homog/grid.hpp"

namespace homog {

/// The delta-cell partition: cells delta(xi + Y) wholly inside the unit square.
struct UnfoldPartition {
  double delta = 0.0;
  int per_side = 0;        ///< floor(1/delta)
  double area_covered = 0.0;   ///< per_side^2 delta^2
  double area_leftover = 0.0;  ///< 1 - area_covered (boundary strip)

  int cell_count() const { return per_side * per_side; }
  Vec2 corner(int cell) const {
    return {delta * (cell % per_side), delta * (cell / per_side)};
  }
  /// True when the macro grid tiles every delta-cell (n delta integral).
  bool aligned_macro(const Grid& macro) const;
  /// True when the micro grid subdivides macro-cell images in y-coordinates
  /// (m multiple of n delta); unfolding quadrature is then exact.
  bool aligned_micro(const Grid& macro, const Grid& micro) const;
};

UnfoldPartition build_partition(double delta);

/// Unfolded samples: per delta-cell, values at the micro grid's quadrature
/// points. comps = 1 for scalars, 2 for gradients.
class UnfoldedField {
 public:
  UnfoldedField(const UnfoldPartition& p, const Grid& ygrid, int comps);

  UnfoldPartition part;
  const Grid* ygrid;
  int comps;
  std::vector<double> vals;  ///< [cell][ycell_y][ycell_x][qb][qa][comp]

  std::size_t index(int cell, int ycx, int ycy, int qa, int qb) const;
  double& at(int cell, int ycx, int ycy, int qa, int qb, int comp);
  double at(int cell, int ycx, int ycy, int qa, int qb, int comp) const;

  /// Double integral over (covered region) x Y: x-measure delta^2 per cell,
  /// y-measure from the micro quadrature. Deterministic reduction.
  double integral(int comp = 0) const;
  double l2_norm_sq() const;  ///< all components
};

/// Unfold a point evaluator (exact pointwise semantics; used for fields,
/// gradients, and products).
UnfoldedField unfold_callable(const std::function<double(Vec2)>& f, const UnfoldPartition& p,
                              const Grid& ygrid);
UnfoldedField unfold(const ScalarField& u, const UnfoldPartition& p, const Grid& ygrid);
UnfoldedField unfold_gradient(const ScalarField& u, const UnfoldPartition& p, const Grid& ygrid);

/// Piecewise-constant-per-delta-cell function on the unit square, zero on the
/// leftover strip (the Y-mean of an unfolded field lives here).
struct CellwiseField {
  UnfoldPartition part;
  std::vector<double> value;  ///< per cell
  double eval(Vec2 x) const;
  double integral() const;
};

CellwiseField mean_over_Y(const UnfoldedField& w);

/// |iint T_delta(u) - int_{covered} u|. The covered-region integral uses exact
/// per-cell integration of the bilinear interpolant over rectangle
/// intersections, so the residual isolates the unfolding quadrature error
/// (zero up to roundoff when aligned).
double check_integral_identity(const ScalarField& u, const UnfoldPartition& p, const Grid& ygrid);

/// First-order reconstruction u1(x,y) = u0(x) w_0(x,y) + sum_i d_i u0(x) w_i(x,y)
/// evaluated through the cell profiles.
class TwoScaleReconstruction {
 public:
  TwoScaleReconstruction(const ScalarField& u0, const CorrectorSet& cs);
  double value(Vec2 x, Vec2 y) const;
  Vec2 grad_y(Vec2 x, Vec2 y) const;
  const ScalarField& u0() const { return *u0_; }
  const CorrectorSet& profiles() const { return *cs_; }

 private:
  const ScalarField* u0_;
  const CorrectorSet* cs_;
};

/// L2(D x Y) norm of T_delta(grad u_delta) - grad u0 - grad_y u1, including the
/// leftover-strip contribution of grad u0 + grad_y u1. Uses a separable
/// expansion when the profiles are x-independent and the grids align (exactly
/// equal to the nested tensor quadrature, which is the general fallback).
double two_scale_error(const ScalarField& u_delta, const TwoScaleReconstruction& rec,
                       const UnfoldPartition& p, const Grid& ygrid);

/// Slow but general nested-quadrature evaluation (kept as the reference path;
/// tests compare the two).
double two_scale_error_reference(const ScalarField& u_delta, const TwoScaleReconstruction& rec,
                                 const UnfoldPartition& p, const Grid& ygrid);

}  // namespace homog
