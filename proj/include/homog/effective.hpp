#pragma once
/// @file effective.hpp
/// @brief Constant-in-y effective coefficients from the cell profiles:
///          a_eff_ij = int_Y (a_ij + sum_l a_il  d w_j / d y_l) dy
///          b_eff_j  = int_Y (b_j  + sum_l b_l   d w_j / d y_l) dy
///          c_eff_i  = int_Y (c_i  + sum_l a_il  d w_0 / d y_l) dy
///          k_eff    = int_Y (k    + sum_l b_l   d w_0 / d y_l) dy
///        tabulated per macro quadrature point (single entry when the family
///        has no x dependence), plus ellipticity checks and the homogenized
///        solve.

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homog/cell.hpp"
#include "homog/coeffs.hpp"
#include "homog/forms.hpp"
#include "homog/solver.hpp"

namespace homog {

struct EffectiveCoefficients {
  const Grid* macro = nullptr;
  bool x_independent = true;
  std::vector<CoeffSample> at;  ///< size 1, or macro cells * quad points

  double alpha_declared = 0.0, beta_declared = 0.0;  ///< from the source family
  double grad_sum_max = 0.0;  ///< M from the corrector set
  /// Measured quadratic-form range over stations and 64 unit directions.
  double alpha_measured = 0.0, beta_measured = 0.0;

  const CoeffSample& station(int cell, int qa, int qb) const;
  nlohmann::json to_json() const;
};

EffectiveCoefficients assemble_effective(const TwoScaleCoefficient& c, const CorrectorSet& cs,
                                         const Grid& macro);

/// Verifies alpha - tol <= min quad form and max quad form <= beta (1 + M) + 1e-6.
/// Throws config_error naming the violated side otherwise; returns (min, max).
std::pair<double, double> check_effective_ellipticity(const EffectiveCoefficients& eff);

/// Constant-coefficient form with the tabulated effective data.
AssembledForm assemble_effective_form(const Grid& g, const EffectiveCoefficients& eff,
                                      double lambda);

/// Exact discrete lower-bound index of the effective form (largest eigenvalue
/// of (-E_sym, M), clamped at 0, 5% safety); the homogenized solve requires
/// lambda above it.
double effective_index(const AssembledForm& eff_form, std::uint64_t seed);

/// G^0_lambda f via the effective form. Throws config_error when lambda is not
/// above the effective index.
ScalarField solve_homogenized(const AssembledForm& eff_form, const ScalarField& f,
                              double index_bound, SolverOptions opts = {});

}  // namespace homog
