#pragma once
/// @file oracles.hpp
/// @brief Independent reference values and cross-check integrators used by the
///        test suites. Everything here is computed by means separate from the
///        library under test: closed forms, 1-D quadrature of known ODE
///        solutions, polar decomposition for radially singular integrands, and
///        dense midpoint sampling. Tests compare library output against these.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double PI = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Frozen closed-form constants
// ---------------------------------------------------------------------------

// For a(y) = c0 + c1 sin(2*pi*y), c0 > |c1|:
//   integral_0^1 dy / a(y) = 1 / sqrt(c0^2 - c1^2)
// so the harmonic mean of a is sqrt(c0^2 - c1^2) and the arithmetic mean is c0.
// A laminate with conductivity a(y1)*I homogenizes to
//   diag(harmonic mean, arithmetic mean) = diag(sqrt(c0^2-c1^2), c0).
inline double layered_harmonic_mean(double c0, double c1) {
  return std::sqrt(c0 * c0 - c1 * c1);
}
inline double layered_arithmetic_mean(double c0, double /*c1*/) { return c0; }

// Frozen values for the default laminate a(y) = 2 + sin(2*pi*y):
inline constexpr double LAYERED_EFF_11 = 1.7320508075688772935;  // sqrt(3)
inline constexpr double LAYERED_EFF_22 = 2.0;

//   integral_0^1 (c0 + c1 sin 2 pi y)^{-2} dy = c0 / (c0^2 - c1^2)^{3/2}
// (differentiate the first-power integral in c0). For (2,1): 2/(3*sqrt(3)).
inline double layered_inv_square_mean(double c0, double c1) {
  double d = c0 * c0 - c1 * c1;
  return c0 / (d * std::sqrt(d));
}

// First unit-cell profile for the laminate: phi'(y) = hm/a(y) - 1, mean-zero
// primitive. Its squared gradient norm over one period:
//   integral (hm/a - 1)^2 = hm^2 * integral a^{-2} - 2 hm * integral a^{-1} + 1
//                         = c0/sqrt(c0^2-c1^2) * ... collapses to:
inline double layered_profile_grad_sq(double c0, double c1) {
  double hm = layered_harmonic_mean(c0, c1);
  return hm * hm * layered_inv_square_mean(c0, c1) - 1.0;  // = c0/hm - 1
}
// Frozen for (2,1): 2/sqrt(3) - 1.
inline constexpr double LAYERED_PROFILE_GRAD_SQ = 0.15470053837925152902;

// Smallest eigenvalue of -Laplace with zero boundary data on the unit square.
inline constexpr double DIRICHLET_EV_UNIT_SQUARE = 2.0 * PI * PI;

// Friedrichs constant used by the library: ||u||_2 <= C_P |u|_{1,2}.
inline constexpr double FRIEDRICHS_CONST = 0.22507907903927651 + 1e-6;  // 1/(sqrt(2) pi) + 1e-6

// Drift inequality constant, sup-norm route, d = 2:
//   |int (b . grad u) u| <= (M/2)(eps D + (d/eps)||u||^2),  eps = lambda/(M/2 + 1)
// gives the ||u||^2 coefficient (M/2) * d * (M/2 + 1) / lambda.
inline double drift_const_supnorm(double M, int d, double lambda) {
  return (M / 2.0) * static_cast<double>(d) * (M / 2.0 + 1.0) / lambda;
}
// Frozen worked case M=2, d=2, lambda=1:
inline constexpr double DRIFT_CONST_M2_D2_L1 = 4.0;

// Classical duality value for the 2x2 checkerboard: geometric mean.
inline double checkerboard_eff(double a_lo, double a_hi) {
  return std::sqrt(a_lo * a_hi);
}

// Manufactured solution on the unit square: u = sin(pi x1) sin(pi x2),
// -Laplace u = 2 pi^2 u, zero trace.
inline double manufactured_u(double x1, double x2) {
  return std::sin(PI * x1) * std::sin(PI * x2);
}
inline double manufactured_f(double x1, double x2) {
  return 2.0 * PI * PI * manufactured_u(x1, x2);
}
// ||u||_{L2}^2 = 1/4.
inline constexpr double MANUFACTURED_L2_SQ = 0.25;

// ---------------------------------------------------------------------------
// Independent integrators
// ---------------------------------------------------------------------------

/// Composite Simpson on [a,b] with n (even) panels — reference 1-D integrator.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 1 << 16) {
  if (n % 2) ++n;
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Mean-zero primitive of g over [0,1], sampled at y. Reference for unit-cell
/// profiles: w(y) = int_0^y g - int_0^1 int_0^t g dt.
class MeanZeroPrimitive {
 public:
  MeanZeroPrimitive(const std::function<double(double)>& g, int n = 1 << 15) : vals_(n + 1) {
    // trapezoid cumulative integral, then subtract the mean
    double h = 1.0 / n;
    vals_[0] = 0.0;
    double prev = g(0.0);
    for (int i = 1; i <= n; ++i) {
      double cur = g(i * h);
      vals_[i] = vals_[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += 0.5 * (vals_[i] + vals_[i + 1]) * h;
    for (auto& v : vals_) v -= mean;
  }
  double operator()(double y) const {
    y -= std::floor(y);
    double t = y * (vals_.size() - 1);
    auto i = static_cast<std::size_t>(t);
    if (i >= vals_.size() - 1) i = vals_.size() - 2;
    double s = t - i;
    return (1.0 - s) * vals_[i] + s * vals_[i + 1];
  }

 private:
  std::vector<double> vals_;
};

/// integral over the unit square centered at (cx,cy) of |y - c|^{-q}, q < 2,
/// by the polar closed form: for each angle, int_0^R r^{1-q} dr = R^{2-q}/(2-q).
/// Assumes (cx,cy) = (0.5,0.5) so the boundary radius is 0.5/max(|cos|,|sin|).
inline double singular_radial_integral(double q, int ntheta = 200000) {
  double s = 0.0, dt = 2.0 * PI / ntheta;
  for (int i = 0; i < ntheta; ++i) {
    double th = (i + 0.5) * dt;
    double m = std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
    double R = 0.5 / m;
    s += std::pow(R, 2.0 - q) / (2.0 - q) * dt;
  }
  return s;
}

/// Dense midpoint cross-check of int_{u>1} (c . grad u + (u-1) k) over the unit
/// square, for a caller-supplied point evaluator. O(1/N) interface error.
struct ClampExcessIntegrand {
  std::function<double(double, double)> u;        // value
  std::function<std::array<double, 2>(double, double)> grad_u;
  std::function<std::array<double, 2>(double, double)> c;
  std::function<double(double, double)> k;
};
inline double clamp_excess_integral(const ClampExcessIntegrand& F, int N = 1024) {
  double h = 1.0 / N, s = 0.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      double x = (i + 0.5) * h, y = (j + 0.5) * h;
      double uv = F.u(x, y);
      if (uv > 1.0) {
        auto g = F.grad_u(x, y);
        auto cc = F.c(x, y);
        s += (cc[0] * g[0] + cc[1] * g[1] + (uv - 1.0) * F.k(x, y)) * h * h;
      }
    }
  return s;
}

}  // namespace oracle
