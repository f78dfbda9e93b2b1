#pragma once
/// @file element_kernels.hpp
/// @brief Internal per-cell element matrices shared by the serial and parallel
///        assembly paths, so the two differ only in traversal/merge strategy.

#include <array>

#include "homog/forms.hpp"
#include "homog/grid.hpp"

namespace homog::detail {

/// Local node (i,j) offsets in the order (0,0), (1,0), (1,1), (0,1).
inline constexpr int LOCAL_DI[4] = {0, 1, 1, 0};
inline constexpr int LOCAL_DJ[4] = {0, 0, 1, 1};

/// Row-major 4x4 element matrix: K[a*4+b] pairs test function a with trial
/// function b, matching the global convention (E u)_i = E(u, phi_i).
using ElementMatrix = std::array<double, 16>;

inline ElementMatrix element_form_matrix(const Grid& g, const PointSampler& s, int cx, int cy) {
  ElementMatrix K{};
  const double inv_h = static_cast<double>(g.n);
  for (int qb = 0; qb < g.quad.npts; ++qb)
    for (int qa = 0; qa < g.quad.npts; ++qa) {
      const CoeffSample cs = s(g.qpoint(cx, cy, qa, qb));
      const auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
      const double w = g.qweight(qa, qb);
      Vec2 grad[4];
      for (int a = 0; a < 4; ++a) grad[a] = {sh.dxi[a] * inv_h, sh.deta[a] * inv_h};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double val = cs.A.apply(grad[b]).dot(grad[a])      // diffusion
                       + cs.B.dot(grad[b]) * sh.N[a]         // drift on the trial gradient
                       + sh.N[b] * cs.C.dot(grad[a])         // drift on the test gradient
                       + cs.k * sh.N[b] * sh.N[a];           // potential
          K[a * 4 + b] += w * val;
        }
    }
  return K;
}

inline ElementMatrix element_mass_matrix(const Grid& g) {
  ElementMatrix K{};
  for (int qb = 0; qb < g.quad.npts; ++qb)
    for (int qa = 0; qa < g.quad.npts; ++qa) {
      const auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
      const double w = g.qweight(qa, qb);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) K[a * 4 + b] += w * sh.N[b] * sh.N[a];
    }
  return K;
}

}  // namespace homog::detail
