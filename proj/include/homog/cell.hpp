#pragma once
/// @file cell.hpp
/// @brief Periodic unit-cell problems: the d directional profiles
///          int_Y A grad w_i . grad phi = -int_Y A e_i . grad phi
///        and the drift profile
///          int_Y A grad w_0 . grad phi = -int_Y C . grad phi,
///        solved in the mean-zero quotient space (pin one degree of freedom,
///        then shift to zero mean).

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "homog/coeffs.hpp"
#include "homog/forms.hpp"
#include "homog/grid.hpp"

namespace homog {

/// Profiles for one macroscopic station x (or shared across x).
struct CellProfiles {
  std::array<ScalarField, 3> w;  ///< w[0]=w_1, w[1]=w_2, w[2]=w_0 (drift)
  std::array<double, 3> grad_norm{};  ///< ||grad w||_{L2(Y)} per profile
  double residual = 0.0;              ///< largest verified solve residual

  CellProfiles(const Grid& y) : w{ScalarField(y), ScalarField(y), ScalarField(y)} {}
};

struct CorrectorSet {
  const Grid* ygrid = nullptr;
  bool x_independent = true;
  std::vector<Vec2> x_stations;       ///< empty when x_independent
  std::vector<CellProfiles> at;       ///< size 1 when x_independent
  /// Declared bound for the drift profile gradient:
  /// (1/alpha) (sum_i ||c_i||_{p0}^2)^{1/2} at the worst station.
  double drift_grad_bound = 0.0;
  /// max over stations of sum_i ||grad w_i||_{L2(Y)} (directional profiles
  /// only); enters the upper effective ellipticity bound beta (1 + M).
  double grad_sum_max = 0.0;

  const CellProfiles& station(std::size_t s) const { return x_independent ? at[0] : at[s]; }

  /// Largest verified solve residual over all stations.
  double worst_residual() const {
    double r = 0.0;
    for (const CellProfiles& p : at) r = std::max(r, p.residual);
    return r;
  }
};

/// Subtract the mean so int_Y w = 0.
void normalize_mean_zero(ScalarField& w);

/// Solve one cell problem with matrix from sampler A(y) (station baked in) and
/// a raw right-hand side over periodic dofs. The rhs must be compatible with
/// the constant kernel: |sum rhs_i| <= 1e-10 ||rhs||_1, else config_error
/// naming the offending sum. pin selects which dof is pinned (default 0);
/// representative independence is a tested invariant. A vanishing rhs
/// (sup norm <= 1e-13) short-circuits to the zero field without assembling.
ScalarField solve_cell_raw(const Grid& ygrid, const PointSampler& a_only,
                           const Eigen::VectorXd& rhs, int pin = 0, double* residual_out = nullptr);

/// Directional profile w_i (dir in {0,1}) at station x.
ScalarField solve_cell_directional(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x,
                                   int dir);
/// Drift profile w_0 at station x.
ScalarField solve_cell_drift(const Grid& ygrid, const TwoScaleCoefficient& c, Vec2 x);

/// All profiles. Stations are the macro grid's quadrature points when the
/// coefficient depends on x; a single shared solve otherwise. For separable
/// scalar families the directional profiles are solved once and shared
/// (the scalar macro factor cancels from both sides).
CorrectorSet solve_correctors(const Grid& ygrid, const TwoScaleCoefficient& c,
                              const Grid* macro_for_stations = nullptr);

}  // namespace homog
