#pragma once
/// @file common.hpp
/// @brief Small shared types, error classes, seeded RNG, and the deterministic
///        parallel reduction used by every quadrature kernel.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace homog {

/// Invalid configuration / violated precondition. CLI maps this to exit code 1.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve failed to reach its tolerance. CLI maps this to exit code 2.
class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm_sq()); }
};

struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  static Mat2 identity(double s = 1.0) { return {s, 0.0, 0.0, s}; }
  Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
  Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  /// Rayleigh-quotient range of the symmetric part (eigenvalues of (A+A^T)/2).
  void sym_range(double& lo, double& hi) const {
    double p = 0.5 * (a11 + a22);
    double off = 0.5 * (a12 + a21);
    double r = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + off * off);
    lo = p - r;
    hi = p + r;
  }
  double quad(Vec2 v) const { return v.dot(apply(v)); }
};

/// z - floor(z), in [0,1). Exact for dyadic arguments.
inline double fractional(double z) {
  double f = z - std::floor(z);
  // Guard z slightly below an integer rounding to f == 1.0.
  return (f >= 1.0) ? 0.0 : f;
}

/// Seeded deterministic RNG. All randomness in the library flows through this
/// so identical seeds reproduce identical runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a = 0.0, double b = 1.0) {
    return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  std::uint64_t integer() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_worker_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Fixed-order pairwise summation. Used as the merge step after parallel
/// per-item fills so reductions do not depend on the number of worker threads.
double pairwise_sum(std::span<const double> v);

/// Evaluates item(i) for i in [0,n) in parallel into a fixed-order buffer and
/// pairwise-sums it. The result is bitwise independent of the thread count.
template <class F>
double parallel_sum(std::size_t n, F&& item) {
  std::vector<double> buf(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    buf[static_cast<std::size_t>(i)] = item(static_cast<std::size_t>(i));
  return pairwise_sum(buf);
}

}  // namespace homog
