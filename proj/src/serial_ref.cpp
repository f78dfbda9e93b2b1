#include "homog/serial_ref.hpp"

#include <vector>

#include "element_kernels.hpp"

namespace homog::serial {

namespace {

template <class CellFn>
double plain_cell_sum(const Grid& g, CellFn&& fn) {
  double s = 0.0;
  for (int cy = 0; cy < g.n; ++cy)
    for (int cx = 0; cx < g.n; ++cx) s += fn(cx, cy);
  return s;
}

}  // namespace

double integrate(const ScalarField& u) {
  const Grid& g = *u.grid;
  return plain_cell_sum(g, [&](int cx, int cy) {
    double s = 0.0;
    double v00 = u.nodal(cx, cy), v10 = u.nodal(cx + 1, cy);
    double v11 = u.nodal(cx + 1, cy + 1), v01 = u.nodal(cx, cy + 1);
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        s += g.qweight(qa, qb) * (sh.N[0] * v00 + sh.N[1] * v10 + sh.N[2] * v11 + sh.N[3] * v01);
      }
    return s;
  });
}

double l2_norm_sq(const ScalarField& u) {
  const Grid& g = *u.grid;
  return plain_cell_sum(g, [&](int cx, int cy) {
    double s = 0.0;
    double v00 = u.nodal(cx, cy), v10 = u.nodal(cx + 1, cy);
    double v11 = u.nodal(cx + 1, cy + 1), v01 = u.nodal(cx, cy + 1);
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        double val = sh.N[0] * v00 + sh.N[1] * v10 + sh.N[2] * v11 + sh.N[3] * v01;
        s += g.qweight(qa, qb) * val * val;
      }
    return s;
  });
}

double h1_seminorm_sq(const ScalarField& u) {
  const Grid& g = *u.grid;
  const double inv_h = static_cast<double>(g.n);
  return plain_cell_sum(g, [&](int cx, int cy) {
    double s = 0.0;
    double v00 = u.nodal(cx, cy), v10 = u.nodal(cx + 1, cy);
    double v11 = u.nodal(cx + 1, cy + 1), v01 = u.nodal(cx, cy + 1);
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

Eigen::SparseMatrix<double> assemble_matrix(const Grid& g, const PointSampler& s) {
  const int ndof = g.dof_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(g.cells()) * 16);
  for (int cy = 0; cy < g.n; ++cy)
    for (int cx = 0; cx < g.n; ++cx) {
      auto K = detail::element_form_matrix(g, s, cx, cy);
      int dof[4];
      for (int a = 0; a < 4; ++a) dof[a] = g.node_dof(cx + detail::LOCAL_DI[a], cy + detail::LOCAL_DJ[a]);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (dof[a] >= 0 && dof[b] >= 0) trips.emplace_back(dof[a], dof[b], K[a * 4 + b]);
    }
  Eigen::SparseMatrix<double> E(ndof, ndof);
  E.setFromTriplets(trips.begin(), trips.end());
  return E;
}

Eigen::SparseMatrix<double> assemble_mass(const Grid& g) {
  const int ndof = g.dof_count();
  auto K = detail::element_mass_matrix(g);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(g.cells()) * 16);
  for (int cy = 0; cy < g.n; ++cy)
    for (int cx = 0; cx < g.n; ++cx) {
      int dof[4];
      for (int a = 0; a < 4; ++a) dof[a] = g.node_dof(cx + detail::LOCAL_DI[a], cy + detail::LOCAL_DJ[a]);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (dof[a] >= 0 && dof[b] >= 0) trips.emplace_back(dof[a], dof[b], K[a * 4 + b]);
    }
  Eigen::SparseMatrix<double> M(ndof, ndof);
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

}  // namespace homog::serial
