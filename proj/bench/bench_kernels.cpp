// Timing comparison of the OpenMP kernels against the serial reference
// implementations, verifying agreement while at it.
//
//   bench_kernels [n]   (default n = 192 cells per side)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <nlohmann/json.hpp>

#include "homog/coeffs.hpp"
#include "homog/common.hpp"
#include "homog/forms.hpp"
#include "homog/grid.hpp"
#include "homog/serial_ref.hpp"

namespace {

template <class Fn>
double best_ms(Fn&& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    if (ms < best) best = ms;
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-22s %10.2f ms %10.2f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, match ? "agree" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 192;
  std::printf("grid %d x %d, %d threads\n", n, n, homog::hardware_threads());
  std::printf("%-22s %13s %13s\n", "kernel", "serial", "parallel");

  homog::Grid g(homog::GridKind::dirichlet, n, 2);
  homog::TwoScaleCoefficient c =
      homog::make_preset("layered", {{"b_amp", 1.0}, {"c_amp", 0.5}, {"k_amp", 0.5}});
  const double delta = 0.125;
  auto sampler = [&](homog::Vec2 x) { return c.eval_delta(delta, x); };

  Eigen::SparseMatrix<double> As, Ap;
  double ms_s = best_ms([&] { As = homog::serial::assemble_matrix(g, sampler); });
  double ms_p = best_ms([&] { Ap = homog::assemble_matrix(g, sampler); });
  report("assemble_matrix", ms_s, ms_p, (As - Ap).norm() == 0.0);

  Eigen::SparseMatrix<double> Ms, Mp;
  ms_s = best_ms([&] { Ms = homog::serial::assemble_mass(g); });
  ms_p = best_ms([&] { Mp = homog::assemble_mass(g); });
  report("assemble_mass", ms_s, ms_p, (Ms - Mp).norm() == 0.0);

  homog::ScalarField u = homog::random_smooth_field(g, 7);
  double vs = 0, vp = 0;
  ms_s = best_ms([&] { vs = homog::serial::l2_norm_sq(u); });
  ms_p = best_ms([&] { vp = homog::l2_norm_sq(u); });
  report("l2_norm_sq", ms_s, ms_p, std::abs(vs - vp) <= 1e-13 * (1.0 + std::abs(vs)));

  ms_s = best_ms([&] { vs = homog::serial::h1_seminorm_sq(u); });
  ms_p = best_ms([&] { vp = homog::h1_seminorm_sq(u); });
  report("h1_seminorm_sq", ms_s, ms_p, std::abs(vs - vp) <= 1e-13 * (1.0 + std::abs(vs)));

  ms_s = best_ms([&] { vs = homog::serial::integrate(u); });
  ms_p = best_ms([&] { vp = homog::integrate(u); });
  report("integrate", ms_s, ms_p, std::abs(vs - vp) <= 1e-13 * (1.0 + std::abs(vs)));

  return 0;
}
