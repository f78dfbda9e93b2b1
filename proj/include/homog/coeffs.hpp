#pragma once
/// @file coeffs.hpp
/// @brief Two-scale coefficient families A(x,y), B(x,y), C(x,y), k(x,y) with
///        declared ellipticity/integrability data, named presets, and the
///        epsilon-realization A(x, x/delta) used by the oscillating forms.

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "homog/common.hpp"
#include "homog/grid.hpp"

namespace homog {

/// One sample of all four coefficient slots at a point (x, y).
struct CoeffSample {
  Mat2 A = Mat2::identity();
  Vec2 B{};  ///< drift acting on grad(solution)
  Vec2 C{};  ///< drift acting on grad(test function)
  double k = 0.0;
};

/// A two-scale coefficient family. x is the macroscopic variable in the unit
/// square, y the unit-cell variable (periodic). Declared bounds are contracts
/// the numeric spot-checks verify against samples.
struct TwoScaleCoefficient {
  std::function<CoeffSample(Vec2 x, Vec2 y)> sample;

  double alpha = 1.0;  ///< lower Rayleigh bound of sym(A)
  double beta = 1.0;   ///< upper Rayleigh bound of sym(A)
  /// Integrability exponent of the lower-order coefficients; +inf means
  /// essentially bounded. Finite values must exceed the dimension (2).
  double p0 = std::numeric_limits<double>::infinity();
  double sup_b = 0.0;  ///< max_i ||b_i||_inf (NaN when unbounded)
  double sup_c = 0.0;  ///< max_i ||c_i||_inf (NaN when unbounded)
  double sup_k = 0.0;  ///< ||k||_inf        (NaN when unbounded)

  bool periodic_only = false;     ///< no x dependence anywhere
  bool separable_scalar = false;  ///< A = A1(x) * A2(y) with scalar A1 > 0
  /// Certified by construction: k >= 0 and the C-drift has nonnegative weak
  /// divergence deficit (int C . grad(phi) >= 0 for nonnegative phi), the
  /// hypotheses of the order-preserving/contraction properties.
  bool markov_compliant = false;

  std::string name;
  std::string params_json;  ///< canonical parameter record for reports

  CoeffSample eval(Vec2 x, Vec2 y) const { return sample(x, y); }

  /// Realization at scale delta: y = frac(x/delta) componentwise.
  CoeffSample eval_delta(double delta, Vec2 x) const {
    return sample(x, {fractional(x.x / delta), fractional(x.y / delta)});
  }
};

/// Named presets. Unknown names or parameters raise config_error.
///
///   constant      A,B,C,k constant (params a11,a12,a21,a22,b1,b2,c1,c2,k)
///   layered       laminate a(y1) = c0 + c1 sin(2 pi y1), A = a I; optional
///                 drift/potential riding the same laminate direction:
///                 B = b_amp (sin 2 pi y1, cos 2 pi y1), C likewise with c_amp,
///                 k = k_amp (1 + sin 2 pi y1)/2
///   checkerboard  2x2 checker on the unit cell, values a_lo / a_hi
///   separable     A = (1 + x_mod * s(x)) * a2(y1) I with s smooth positive;
///                 C = c_amp * x_mod-modulated laminate drift
///   gradient-drift A = I; C is a gradient field selected by psi:
///                 "cosy1"  psi = cos(2 pi y1) (periodic; Markov flag false)
///                 "negsq"  psi = -|x|^2/2, i.e. C = -x (Markov flag true)
///                 optional k_amp >= 0 adds k = k_amp (1 + cos 2 pi y1)/2
///   singular-drift A = I; B (and optionally C) = |y - y0|^{-s} radial field,
///                 clamped at radius 1e-8, declared finite p0 with s p0 < 2
TwoScaleCoefficient make_preset(const std::string& name, const nlohmann::json& params);

/// Sampled verification of the declared data.
struct BoundsReport {
  double alpha_hat = 0.0;  ///< smallest sampled Rayleigh quotient of sym(A)
  double beta_hat = 0.0;   ///< largest sampled Rayleigh quotient of sym(A)
  double min_weak_div_c = 0.0;  ///< min over bump basket of int_Y C(x,.) . grad(phi)
  bool declared_bounds_hold = false;
};

/// Samples sym(A) Rayleigh quotients on the y-grid quadrature points for a few
/// x stations, asserts alpha <= alpha_hat and beta_hat <= beta within 1e-12,
/// and spot-checks the weak divergence sign of C against nonnegative nodal
/// bumps on the y-grid. Throws config_error when a declared bound fails.
BoundsReport verify_bounds(const TwoScaleCoefficient& c, const Grid& ygrid, int x_stations,
                           std::uint64_t seed);

/// Quadrature of |b_i(x0,.)|^{p0} over the unit cell (finite p0 only);
/// component-summed p0-norm to the power p0.
double lower_order_lp_mass(const TwoScaleCoefficient& c, const Grid& ygrid, Vec2 x0);

}  // namespace homog
