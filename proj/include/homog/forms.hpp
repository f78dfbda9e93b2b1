#pragma once
/// @file forms.hpp
/// @brief Assembly of the nonsymmetric energy form
///          E(u,v) = int A grad u . grad v + (B . grad u) v + u (C . grad v) + k u v
///        over bilinear elements, its resolvent pencil E + lambda M, the
///        lower-bound index and sector diagnostics, and the drift/potential
///        inequality estimators.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/SparseCore>
#include <nlohmann/json_fwd.hpp>

#include "homog/coeffs.hpp"
#include "homog/common.hpp"
#include "homog/grid.hpp"

namespace homog {

/// Coefficient sample at a physical point (scale already applied).
using PointSampler = std::function<CoeffSample(Vec2)>;

/// Sparse matrices over a grid's degrees of freedom. Row = test function,
/// column = trial function, so (E u)_i = E(u, phi_i) and v^T E u = E(u, v).
/// Dirichlet boundary nodes are eliminated, not penalized.
Eigen::SparseMatrix<double> assemble_matrix(const Grid& g, const PointSampler& s);
Eigen::SparseMatrix<double> assemble_mass(const Grid& g);
/// Plain gradient-product matrix (the Dirichlet integral D(u,v)).
Eigen::SparseMatrix<double> assemble_stiffness(const Grid& g);

/// Load vectors: int f phi_i and int F . grad phi_i.
Eigen::VectorXd assemble_load(const Grid& g, const std::function<double(Vec2)>& f);
Eigen::VectorXd assemble_gradient_load(const Grid& g, const std::function<Vec2(Vec2)>& F);

struct AssembledForm {
  const Grid* grid = nullptr;
  double delta = 0.0;   ///< oscillation scale (0 for constant/effective forms)
  double lambda = 0.0;  ///< resolvent shift
  Eigen::SparseMatrix<double> E;
  Eigen::SparseMatrix<double> M;

  Eigen::SparseMatrix<double> pencil() const {
    Eigen::SparseMatrix<double> p = E;
    p += lambda * M;
    return p;
  }
  /// E(u,v) (no lambda term).
  double form(const ScalarField& u, const ScalarField& v) const { return v.v.dot(E * u.v); }
  /// E_lambda(u,u) = E(u,u) + lambda ||u||^2.
  double energy(const ScalarField& u) const {
    return u.v.dot(E * u.v) + lambda * u.v.dot(M * u.v);
  }
};

/// Oscillating-coefficient resolvent form at scale delta.
AssembledForm assemble_resolvent_form(const Grid& g, const TwoScaleCoefficient& c, double delta,
                                      double lambda);
/// Form from an arbitrary point sampler (constant or tabulated coefficients).
AssembledForm assemble_sampler_form(const Grid& g, const PointSampler& s, double lambda,
                                    double delta = 0.0);

// ---------------------------------------------------------------------------
// Lower-order term estimators:  |int T(u,u)| <= lambda D(u,u) + beta0 ||u||^2
// ---------------------------------------------------------------------------

enum class TermKind { drift_b, drift_c, potential };
enum class Beta0Mode { automatic, analytic, empirical };

/// Analytic mode (bounded coefficients only): sup-norm constant
///   (M/2) d (M/2 + 1) / lambda for the drifts (d = 2), ||k||_inf for the
/// potential. Empirical mode (any integrability): smallest constant valid on a
/// 200-field seeded basket, polished by a shifted power iteration on the
/// symmetric pencil so it bounds every field, then inflated by 1.5.
/// Throws config_error when analytic mode is requested without finite
/// sup-norms.
double estimate_beta0(const Grid& g, const TwoScaleCoefficient& c, double delta, double lambda,
                      Beta0Mode mode, TermKind term, std::uint64_t seed, int basket = 200);

/// Form-level lower-bound index composed from the per-term estimators: each
/// drift term gets half the ellipticity budget (its Dirichlet-integral
/// coefficient is alpha/2), the potential contributes its own constant, so
/// E(u,u) + beta0 ||u||^2 >= 0 for every field. Empirical terms are maximized
/// over the given scales.
double compose_form_index(const Grid& g, const TwoScaleCoefficient& c,
                          const std::vector<double>& deltas, Beta0Mode mode, std::uint64_t seed,
                          int basket = 200);

// ---------------------------------------------------------------------------
// Form diagnostics
// ---------------------------------------------------------------------------

struct FormDiagnostics {
  /// Exact discrete lower-bound index (largest eigenvalue of (-E_sym, M),
  /// clamped at 0, 5% safety): E(u,u) + beta0 ||u||^2 >= 0 for every field.
  double beta0 = 0.0;
  /// Sampled sector bound: max |E(u,v)| / sqrt(E_b(u,u) E_b(v,v)) at b = beta0+1.
  double sector_bound = 0.0;
  /// Sampled Rayleigh range of E_b against the H1 norm at b = beta0+1.
  double kappa1_sampled = 0.0, kappa2_sampled = 0.0;
  /// Exact discrete coercivity of E_lambda against the H1 norm (pencil minimum,
  /// 1% shaved) at the form's own lambda; used by the a-priori check.
  double kappa1_exact = 0.0;
  double friedrichs = 0.0;  ///< Friedrichs constant used in the dual-norm bound
  bool pencil_m_matrix = false;  ///< off-diagonal signs of E + lambda M
};

FormDiagnostics diagnose_form(const AssembledForm& f, int samples, std::uint64_t seed);

/// Minimum over seeded fields of (E(u,u) + beta0 ||u||^2) / ||u||_{H1}^2.
double check_garding(const AssembledForm& f, double beta0, int samples, std::uint64_t seed);

/// Sampled sector constant of E against E_beta; throws config_error naming the
/// witness when some E_beta(u,u) <= 0 (beta below the index).
double check_sector(const AssembledForm& f, double beta, int pairs, std::uint64_t seed);

/// Value of E(Uu, u - Uu) for the unit contraction Uu = (0 v u) ^ 1, evaluated
/// with the pointwise case decomposition (only {u > 1} contributes:
/// int_{u>1} C . grad u + (u-1) k). Cut cells are classified exactly by corner
/// values and refined dyadically before quadrature.
double check_unit_contraction(const Grid& g, const TwoScaleCoefficient& c, double delta,
                              const ScalarField& u);

}  // namespace homog
