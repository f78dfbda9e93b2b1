#pragma once
/// @file solver.hpp
/// @brief Resolvent application G_lambda f = (E + lambda M)^{-1} M f on
///        dirichlet grids: sparse direct factorization on moderate grids,
///        preconditioned BiCGStab above, verified residuals, dual (adjoint)
///        solves, and the resolvent-family consistency checks.

#include <memory>
#include <string>

#include <Eigen/SparseCore>

#include "homog/forms.hpp"
#include "homog/grid.hpp"

namespace homog {

enum class SolveMethod { automatic, direct_lu, bicgstab };

struct SolveStats {
  std::string method;
  int iterations = 0;      ///< 0 for direct solves
  double residual = 0.0;   ///< verified relative residual of the last solve
};

struct SolverOptions {
  SolveMethod method = SolveMethod::automatic;
  double tolerance = 1e-10;  ///< relative residual each solve must meet
  int max_iterations = 4000;
  /// automatic picks the direct factorization up to this many cells per side.
  int direct_limit = 256;
};

/// Factorized resolvent at a fixed lambda. Every solve verifies its relative
/// residual against options.tolerance and throws solver_error on failure.
class ResolventOperator {
 public:
  ResolventOperator(const AssembledForm& form, SolverOptions opts = {});
  ~ResolventOperator();
  ResolventOperator(ResolventOperator&&) noexcept;
  ResolventOperator& operator=(ResolventOperator&&) noexcept;

  /// G_lambda f: solve (E + lambda M) u = M f for L2 data f.
  ScalarField apply(const ScalarField& f) const;
  /// Solve (E + lambda M) u = rhs for a precomputed dual vector (H^-1 data).
  ScalarField apply_dual_vector(const Eigen::VectorXd& rhs) const;
  /// Co-resolvent G^_lambda g: solve (E + lambda M)^T u = M g.
  ScalarField apply_adjoint(const ScalarField& g) const;

  const SolveStats& last_stats() const { return stats_; }
  const AssembledForm& form() const { return *form_; }
  double lambda() const { return form_->lambda; }

 private:
  struct Impl;
  const AssembledForm* form_;
  SolverOptions opts_;
  std::unique_ptr<Impl> impl_;
  mutable SolveStats stats_;

  Eigen::VectorXd solve_vec(const Eigen::VectorXd& rhs, bool adjoint) const;
};

/// Relative L2 residual of (G_l - G_m) f = (m - l) G_l G_m f over ||f||.
double check_resolvent_identity(const AssembledForm& base, double lambda, double mu,
                                const ScalarField& f, SolverOptions opts = {});

/// |<G_lambda f, g> - <f, G^_lambda g>| / max(1, |<G_lambda f, g>|).
double check_duality(const ResolventOperator& op, const ScalarField& f, const ScalarField& g);

/// True when the pencil has nonpositive off-diagonal entries (inverse-positive
/// stencil); order/contraction assertions are only valid on such grids.
bool pencil_is_m_matrix(const Eigen::SparseMatrix<double>& P, double tol = 1e-13);

struct OrderReport {
  double min_value = 0.0, max_value = 0.0;  ///< range of lambda G_lambda f
  bool m_matrix = false;  ///< assertions apply only when true
};

/// Range of lambda G_lambda f for data 0 <= f <= 1 (sub-Markov spot check;
/// reported always, assertable only on m_matrix grids).
OrderReport check_order_preservation(const ResolventOperator& op, const ScalarField& f01);

struct AprioriReport {
  double lhs = 0.0;   ///< ||u||_{H1}
  double rhs = 0.0;   ///< C_F ||f|| / kappa1
  bool pass = false;
};

/// ||u||_{H1} <= ||f||_{H^-1} / kappa1 with ||f||_{H^-1} <= C_F ||f||_{L2};
/// kappa1 must be the exact pencil coercivity from diagnose_form.
AprioriReport check_apriori(const ScalarField& u, const ScalarField& f, double kappa1_exact);

}  // namespace homog
