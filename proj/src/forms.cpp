#include "homog/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "element_kernels.hpp"
#include "homog/eigs.hpp"
#include "homog/solver.hpp"

namespace homog {

namespace {

/// Parallel per-cell element computation, fixed-order serial merge. Matches
/// the serial reference bitwise (same element arithmetic, same triplet order).
template <class ElemFn>
Eigen::SparseMatrix<double> assemble_from_elements(const Grid& g, ElemFn&& elem) {
  const long long ncells = g.cells();
  std::vector<detail::ElementMatrix> elems(static_cast<std::size_t>(ncells));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < ncells; ++c)
    elems[static_cast<std::size_t>(c)] = elem(static_cast<int>(c % g.n), static_cast<int>(c / g.n));

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(ncells) * 16);
  for (long long c = 0; c < ncells; ++c) {
    int cx = static_cast<int>(c % g.n), cy = static_cast<int>(c / g.n);
    const auto& K = elems[static_cast<std::size_t>(c)];
    int dof[4];
    for (int a = 0; a < 4; ++a) dof[a] = g.node_dof(cx + detail::LOCAL_DI[a], cy + detail::LOCAL_DJ[a]);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (dof[a] >= 0 && dof[b] >= 0) trips.emplace_back(dof[a], dof[b], K[a * 4 + b]);
  }
  Eigen::SparseMatrix<double> E(g.dof_count(), g.dof_count());
  E.setFromTriplets(trips.begin(), trips.end());
  return E;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_matrix(const Grid& g, const PointSampler& s) {
  return assemble_from_elements(g, [&](int cx, int cy) { return detail::element_form_matrix(g, s, cx, cy); });
}

Eigen::SparseMatrix<double> assemble_mass(const Grid& g) {
  const auto K = detail::element_mass_matrix(g);
  return assemble_from_elements(g, [&](int, int) { return K; });
}

Eigen::SparseMatrix<double> assemble_stiffness(const Grid& g) {
  return assemble_matrix(g, [](Vec2) { return CoeffSample{Mat2::identity(), {}, {}, 0.0}; });
}

Eigen::VectorXd assemble_load(const Grid& g, const std::function<double(Vec2)>& f) {
  const long long ncells = g.cells();
  std::vector<std::array<double, 4>> loc(static_cast<std::size_t>(ncells));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < ncells; ++c) {
    int cx = static_cast<int>(c % g.n), cy = static_cast<int>(c / g.n);
    std::array<double, 4> b{};
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        double w = g.qweight(qa, qb) * f(g.qpoint(cx, cy, qa, qb));
        for (int a = 0; a < 4; ++a) b[a] += w * sh.N[a];
      }
    loc[static_cast<std::size_t>(c)] = b;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.dof_count());
  for (long long c = 0; c < ncells; ++c) {
    int cx = static_cast<int>(c % g.n), cy = static_cast<int>(c / g.n);
    for (int a = 0; a < 4; ++a) {
      int d = g.node_dof(cx + detail::LOCAL_DI[a], cy + detail::LOCAL_DJ[a]);
      if (d >= 0) rhs[d] += loc[static_cast<std::size_t>(c)][a];
    }
  }
  return rhs;
}

Eigen::VectorXd assemble_gradient_load(const Grid& g, const std::function<Vec2(Vec2)>& F) {
  const long long ncells = g.cells();
  const double inv_h = static_cast<double>(g.n);
  std::vector<std::array<double, 4>> loc(static_cast<std::size_t>(ncells));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < ncells; ++c) {
    int cx = static_cast<int>(c % g.n), cy = static_cast<int>(c / g.n);
    std::array<double, 4> b{};
    for (int qb = 0; qb < g.quad.npts; ++qb)
      for (int qa = 0; qa < g.quad.npts; ++qa) {
        auto sh = ShapeEval::at(g.quad.pt[qa], g.quad.pt[qb]);
        Vec2 Fq = F(g.qpoint(cx, cy, qa, qb));
        double w = g.qweight(qa, qb);
        for (int a = 0; a < 4; ++a)
          b[a] += w * (Fq.x * sh.dxi[a] * inv_h + Fq.y * sh.deta[a] * inv_h);
      }
    loc[static_cast<std::size_t>(c)] = b;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.dof_count());
  for (long long c = 0; c < ncells; ++c) {
    int cx = static_cast<int>(c % g.n), cy = static_cast<int>(c / g.n);
    for (int a = 0; a < 4; ++a) {
      int d = g.node_dof(cx + detail::LOCAL_DI[a], cy + detail::LOCAL_DJ[a]);
      if (d >= 0) rhs[d] += loc[static_cast<std::size_t>(c)][a];
    }
  }
  return rhs;
}

AssembledForm assemble_resolvent_form(const Grid& g, const TwoScaleCoefficient& c, double delta,
                                      double lambda) {
  if (delta <= 0.0) throw config_error("oscillation scale must be positive, got " + std::to_string(delta));
  AssembledForm f;
  f.grid = &g;
  f.delta = delta;
  f.lambda = lambda;
  f.E = assemble_matrix(g, [&c, delta](Vec2 x) { return c.eval_delta(delta, x); });
  f.M = assemble_mass(g);
  return f;
}

AssembledForm assemble_sampler_form(const Grid& g, const PointSampler& s, double lambda, double delta) {
  AssembledForm f;
  f.grid = &g;
  f.delta = delta;
  f.lambda = lambda;
  f.E = assemble_matrix(g, s);
  f.M = assemble_mass(g);
  return f;
}

// ---------------------------------------------------------------------------
// Lower-order term estimators
// ---------------------------------------------------------------------------

namespace {

PointSampler term_only_sampler(const TwoScaleCoefficient& c, double delta, TermKind term) {
  return [&c, delta, term](Vec2 x) {
    CoeffSample full = c.eval_delta(delta, x);
    CoeffSample out;  // A = identity by default; zero it: the term matrix must carry only the term
    out.A = Mat2{0.0, 0.0, 0.0, 0.0};
    switch (term) {
      case TermKind::drift_b: out.B = full.B; break;
      case TermKind::drift_c: out.C = full.C; break;
      case TermKind::potential: out.k = full.k; break;
    }
    return out;
  };
}

double analytic_term_constant(const TwoScaleCoefficient& c, double lambda, TermKind term) {
  const int d = 2;
  double sup = 0.0;
  const char* which = "";
  switch (term) {
    case TermKind::drift_b: sup = c.sup_b; which = "drift"; break;
    case TermKind::drift_c: sup = c.sup_c; which = "drift"; break;
    case TermKind::potential: sup = c.sup_k; which = "potential"; break;
  }
  if (!std::isfinite(sup))
    throw config_error("analytic lower-order constant needs bounded coefficients; preset '" + c.name +
                       "' declares an unbounded " + std::string(which) + " (use the empirical mode)");
  if (term == TermKind::potential) return sup;
  if (lambda <= 0.0)
    throw config_error("analytic drift constant needs lambda > 0, got " + std::to_string(lambda));
  const double half = 0.5 * sup;
  return half * d * (half + 1.0) / lambda;
}

}  // namespace

double estimate_beta0(const Grid& g, const TwoScaleCoefficient& c, double delta, double lambda,
                      Beta0Mode mode, TermKind term, std::uint64_t seed, int basket) {
  if (mode == Beta0Mode::automatic) {
    double sup = term == TermKind::drift_b ? c.sup_b
                 : term == TermKind::drift_c ? c.sup_c
                                             : c.sup_k;
    mode = std::isfinite(sup) ? Beta0Mode::analytic : Beta0Mode::empirical;
  }
  if (mode == Beta0Mode::analytic) return analytic_term_constant(c, lambda, term);

  // Empirical mode: smallest constant with  |u^T T u| <= lambda u^T K u + beta0 ||u||^2
  // over random fields, polished to the exact discrete pencil maximum.
  Eigen::SparseMatrix<double> T = assemble_matrix(g, term_only_sampler(c, delta, term));
  Eigen::SparseMatrix<double> Tsym = Eigen::SparseMatrix<double>(0.5 * (T + Eigen::SparseMatrix<double>(T.transpose())));
  Eigen::SparseMatrix<double> K = assemble_stiffness(g);
  Eigen::SparseMatrix<double> M = assemble_mass(g);

  double best = 0.0;
  for (int i = 0; i < basket; ++i) {
    ScalarField u = random_nodal_field(g, seed + 7919 * static_cast<std::uint64_t>(i));
    double t = std::abs(u.v.dot(Tsym * u.v));
    double kq = u.v.dot(K * u.v);
    double mq = u.v.dot(M * u.v);
    best = std::max(best, (t - lambda * kq) / mq);
  }

  Eigen::SparseMatrix<double> Hp = Tsym - lambda * K;
  Eigen::SparseMatrix<double> Hm = Eigen::SparseMatrix<double>(-1.0 * Tsym) - lambda * K;
  double exact = std::max(pencil_max_eig(Hp, M, seed ^ 0x9e3779b97f4a7c15ull),
                          pencil_max_eig(Hm, M, seed ^ 0x2545f4914f6cdd1dull));
  return std::max(0.0, std::max(best, exact)) * 1.5;
}

double compose_form_index(const Grid& g, const TwoScaleCoefficient& c,
                          const std::vector<double>& deltas, Beta0Mode mode, std::uint64_t seed,
                          int basket) {
  if (deltas.empty()) throw config_error("compose_form_index: empty scale list");
  Beta0Mode eff = mode;
  if (eff == Beta0Mode::automatic) {
    const bool bounded =
        std::isfinite(c.sup_b) && std::isfinite(c.sup_c) && std::isfinite(c.sup_k);
    eff = bounded ? Beta0Mode::analytic : Beta0Mode::empirical;
  }
  const double budget = 0.5 * c.alpha;  // Dirichlet budget per drift term
  auto term_const = [&](TermKind term, std::uint64_t s) {
    if (eff == Beta0Mode::analytic) return analytic_term_constant(c, budget, term);
    double worst = 0.0;
    for (double d : deltas)
      worst = std::max(worst, estimate_beta0(g, c, d, budget, Beta0Mode::empirical, term, s, basket));
    return worst;
  };
  return term_const(TermKind::drift_b, seed) +
         term_const(TermKind::drift_c, seed ^ 0xff51afd7ed558ccdull) +
         term_const(TermKind::potential, seed ^ 0xd6e8feb86659fd93ull);
}

// ---------------------------------------------------------------------------
// Form diagnostics
// ---------------------------------------------------------------------------

FormDiagnostics diagnose_form(const AssembledForm& f, int samples, std::uint64_t seed) {
  if (samples < 1) throw config_error("diagnose_form: need at least one sample field");
  FormDiagnostics d;
  const Grid& g = *f.grid;

  Eigen::SparseMatrix<double> Esym =
      Eigen::SparseMatrix<double>(0.5 * (f.E + Eigen::SparseMatrix<double>(f.E.transpose())));
  Eigen::SparseMatrix<double> negEsym = Eigen::SparseMatrix<double>(-1.0 * Esym);
  double raw_index = pencil_max_eig(negEsym, f.M, seed ^ 0xa24baed4963ee407ull);
  d.beta0 = std::max(0.0, raw_index) * 1.05;

  const double b = d.beta0 + 1.0;
  Eigen::SparseMatrix<double> K = assemble_stiffness(g);
  Eigen::SparseMatrix<double> H1 = K;
  H1 += f.M;

  auto eb = [&](const Eigen::VectorXd& u) { return u.dot(Esym * u) + b * u.dot(f.M * u); };

  Rng rng(seed);
  double sector = 0.0, k1 = std::numeric_limits<double>::infinity(), k2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    ScalarField u = random_nodal_field(g, rng.integer());
    ScalarField v = random_nodal_field(g, rng.integer());
    double ebu = eb(u.v), ebv = eb(v.v);
    double cross = std::abs(v.v.dot(f.E * u.v));
    sector = std::max(sector, cross / std::sqrt(ebu * ebv));
    double h1u = u.v.dot(H1 * u.v);
    k1 = std::min(k1, ebu / h1u);
    k2 = std::max(k2, ebu / h1u);
  }
  d.sector_bound = std::max(sector, 1.0);  // the constant is >= 1 by definition (take u = v)
  d.kappa1_sampled = k1;
  d.kappa2_sampled = k2;

  if (f.lambda > raw_index + 1e-12) {
    Eigen::SparseMatrix<double> S = Esym;
    S += f.lambda * f.M;
    d.kappa1_exact = pencil_min_eig(S, H1, seed ^ 0x853c49e6748fea9bull) * 0.99;
  } else {
    d.kappa1_exact = 0.0;
  }
  d.friedrichs = friedrichs_constant();
  d.pencil_m_matrix = pencil_is_m_matrix(f.pencil());
  return d;
}

double check_garding(const AssembledForm& f, double beta0, int samples, std::uint64_t seed) {
  const Grid& g = *f.grid;
  Eigen::SparseMatrix<double> K = assemble_stiffness(g);
  Eigen::SparseMatrix<double> H1 = K;
  H1 += f.M;
  double worst = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    ScalarField u = random_nodal_field(g, rng.integer());
    double val = u.v.dot(f.E * u.v) + beta0 * u.v.dot(f.M * u.v);
    worst = std::min(worst, val / u.v.dot(H1 * u.v));
  }
  return worst;
}

double check_sector(const AssembledForm& f, double beta, int pairs, std::uint64_t seed) {
  Eigen::SparseMatrix<double> Esym =
      Eigen::SparseMatrix<double>(0.5 * (f.E + Eigen::SparseMatrix<double>(f.E.transpose())));
  auto eb = [&](const Eigen::VectorXd& u) { return u.dot(Esym * u) + beta * u.dot(f.M * u); };
  Rng rng(seed);
  double worst = 1.0;  // attained at u = v
  for (int i = 0; i < pairs; ++i) {
    ScalarField u = random_nodal_field(*f.grid, rng.integer());
    ScalarField v = random_nodal_field(*f.grid, rng.integer());
    double ebu = eb(u.v), ebv = eb(v.v);
    if (ebu <= 0.0 || ebv <= 0.0)
      throw config_error("sector check at shift " + std::to_string(beta) + ": field pair " + std::to_string(i) +
                         " has nonpositive symmetric energy (" + std::to_string(std::min(ebu, ebv)) +
                         "); the shift is below the lower-bound index");
    worst = std::max(worst, std::abs(v.v.dot(f.E * u.v)) / std::sqrt(ebu * ebv));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Unit contraction
// ---------------------------------------------------------------------------

namespace {

/// Corner values of a bilinear function on the sub-rectangle
/// [x0,x1] x [e0,e1] of the reference cell, given the cell's corner values.
struct BilinearPatch {
  double v00, v10, v11, v01;
  double at(double xi, double eta) const {
    return (1 - xi) * (1 - eta) * v00 + xi * (1 - eta) * v10 + xi * eta * v11 + (1 - xi) * eta * v01;
  }
};

struct ClampAccum {
  const Grid* g;
  const TwoScaleCoefficient* c;
  double delta;
  BilinearPatch u;  // reference-cell corner values
  int cx, cy;
  double inv_h;

  /// Integrand C . grad u + (u - 1) k at reference point (xi, eta), with the
  /// coefficient sampled at the physical image.
  double integrand(double xi, double eta) const {
    Vec2 p{(cx + xi) * g->h(), (cy + eta) * g->h()};
    CoeffSample cs = c->eval_delta(delta, p);
    double gx = ((1 - eta) * (u.v10 - u.v00) + eta * (u.v11 - u.v01)) * inv_h;
    double gy = ((1 - xi) * (u.v01 - u.v00) + xi * (u.v11 - u.v10)) * inv_h;
    return cs.C.x * gx + cs.C.y * gy + (u.at(xi, eta) - 1.0) * cs.k;
  }

  /// Tensor Gauss over the reference sub-rectangle (physical weights).
  double gauss_subrect(double x0, double x1, double e0, double e1, bool indicator) const {
    const QuadratureRule& q = g->quad;
    double s = 0.0;
    double wx = (x1 - x0), we = (e1 - e0);
    for (int qb = 0; qb < q.npts; ++qb)
      for (int qa = 0; qa < q.npts; ++qa) {
        double xi = x0 + wx * q.pt[qa];
        double eta = e0 + we * q.pt[qb];
        if (indicator && u.at(xi, eta) <= 1.0) continue;
        s += q.wt[qa] * q.wt[qb] * wx * we * integrand(xi, eta);
      }
    return s * g->h() * g->h();
  }

  /// Recursive dyadic classification: bilinear extrema sit at corners, so a
  /// sub-rectangle is fully inside/outside {u > 1} iff its corners are.
  double clamp_region_integral(double x0, double x1, double e0, double e1, int depth) const {
    double c00 = u.at(x0, e0), c10 = u.at(x1, e0), c11 = u.at(x1, e1), c01 = u.at(x0, e1);
    double lo = std::min(std::min(c00, c10), std::min(c11, c01));
    double hi = std::max(std::max(c00, c10), std::max(c11, c01));
    if (hi <= 1.0) return 0.0;
    if (lo >= 1.0) return gauss_subrect(x0, x1, e0, e1, false);
    if (depth == 0) return gauss_subrect(x0, x1, e0, e1, true);
    double xm = 0.5 * (x0 + x1), em = 0.5 * (e0 + e1);
    return clamp_region_integral(x0, xm, e0, em, depth - 1) +
           clamp_region_integral(xm, x1, e0, em, depth - 1) +
           clamp_region_integral(x0, xm, em, e1, depth - 1) +
           clamp_region_integral(xm, x1, em, e1, depth - 1);
  }
};

}  // namespace

double check_unit_contraction(const Grid& g, const TwoScaleCoefficient& c, double delta,
                              const ScalarField& u) {
  if (delta <= 0.0) throw config_error("oscillation scale must be positive, got " + std::to_string(delta));
  constexpr int MAX_DEPTH = 10;
  return parallel_sum(static_cast<std::size_t>(g.cells()), [&](std::size_t cell) {
    int cx = static_cast<int>(cell % g.n), cy = static_cast<int>(cell / g.n);
    ClampAccum acc{&g, &c, delta,
                   BilinearPatch{u.nodal(cx, cy), u.nodal(cx + 1, cy), u.nodal(cx + 1, cy + 1),
                                 u.nodal(cx, cy + 1)},
                   cx, cy, static_cast<double>(g.n)};
    return acc.clamp_region_integral(0.0, 1.0, 0.0, 1.0, MAX_DEPTH);
  });
}

}  // namespace homog
