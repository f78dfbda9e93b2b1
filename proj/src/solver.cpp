#include "homog/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace homog {

struct ResolventOperator::Impl {
  Eigen::SparseMatrix<double> P;
  bool use_direct = true;

  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
  std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>> it;

  // Adjoint solvers are built on first use; most runs never need them.
  mutable Eigen::SparseMatrix<double> Padj;
  mutable std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_adj;
  mutable std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>
      it_adj;
};

ResolventOperator::ResolventOperator(const AssembledForm& form, SolverOptions opts)
    : form_(&form), opts_(opts), impl_(new Impl) {
  impl_->P = form.pencil();
  impl_->use_direct = (opts.method == SolveMethod::direct_lu) ||
                      (opts.method == SolveMethod::automatic && form.grid->n <= opts.direct_limit);
  if (impl_->use_direct) {
    impl_->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    impl_->lu->compute(impl_->P);
    if (impl_->lu->info() != Eigen::Success)
      throw solver_error("sparse factorization of the resolvent pencil failed (singular at shift " +
                         std::to_string(form.lambda) + "?)");
  } else {
    impl_->it =
        std::make_unique<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>();
    impl_->it->setTolerance(opts.tolerance * 1e-2);
    impl_->it->setMaxIterations(opts.max_iterations);
    impl_->it->compute(impl_->P);
    if (impl_->it->info() != Eigen::Success)
      throw solver_error("preconditioner construction failed for the resolvent pencil");
  }
}

ResolventOperator::~ResolventOperator() = default;
ResolventOperator::ResolventOperator(ResolventOperator&&) noexcept = default;
ResolventOperator& ResolventOperator::operator=(ResolventOperator&&) noexcept = default;

Eigen::VectorXd ResolventOperator::solve_vec(const Eigen::VectorXd& rhs, bool adjoint) const {
  Impl& im = *impl_;
  if (adjoint && im.Padj.rows() == 0) {
    im.Padj = im.P.transpose();
    if (im.use_direct) {
      im.lu_adj = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      im.lu_adj->compute(im.Padj);
      if (im.lu_adj->info() != Eigen::Success)
        throw solver_error("sparse factorization of the adjoint pencil failed");
    } else {
      im.it_adj =
          std::make_unique<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>();
      im.it_adj->setTolerance(opts_.tolerance * 1e-2);
      im.it_adj->setMaxIterations(opts_.max_iterations);
      im.it_adj->compute(im.Padj);
    }
  }

  Eigen::VectorXd x;
  int iterations = 0;
  if (im.use_direct) {
    x = (adjoint ? *im.lu_adj : *im.lu).solve(rhs);
    stats_.method = "direct_lu";
  } else {
    auto& solver = adjoint ? *im.it_adj : *im.it;
    x = solver.solve(rhs);
    iterations = static_cast<int>(solver.iterations());
    stats_.method = "bicgstab";
  }

  const Eigen::SparseMatrix<double>& A = adjoint ? im.Padj : im.P;
  double rhs_norm = rhs.norm();
  double rel = (rhs_norm == 0.0) ? 0.0 : (A * x - rhs).norm() / rhs_norm;
  stats_.iterations = iterations;
  stats_.residual = rel;
  if (!(rel <= opts_.tolerance))
    throw solver_error("linear solve (" + stats_.method + ") missed tolerance: relative residual " +
                       std::to_string(rel) + " after " + std::to_string(iterations) + " iterations");
  return x;
}

ScalarField ResolventOperator::apply(const ScalarField& f) const {
  ScalarField u(*form_->grid);
  u.v = solve_vec(form_->M * f.v, false);
  return u;
}

ScalarField ResolventOperator::apply_dual_vector(const Eigen::VectorXd& rhs) const {
  ScalarField u(*form_->grid);
  u.v = solve_vec(rhs, false);
  return u;
}

ScalarField ResolventOperator::apply_adjoint(const ScalarField& g) const {
  ScalarField u(*form_->grid);
  u.v = solve_vec(form_->M * g.v, true);
  return u;
}

double check_resolvent_identity(const AssembledForm& base, double lambda, double mu,
                                const ScalarField& f, SolverOptions opts) {
  AssembledForm fl = base;
  fl.lambda = lambda;
  AssembledForm fm = base;
  fm.lambda = mu;
  ResolventOperator Gl(fl, opts), Gm(fm, opts);

  ScalarField glf = Gl.apply(f);
  ScalarField gmf = Gm.apply(f);
  ScalarField glgmf = Gl.apply(gmf);

  ScalarField lhs(*base.grid);
  lhs.v = glf.v - gmf.v - (mu - lambda) * glgmf.v;
  double fn = l2_norm(f);
  return (fn == 0.0) ? 0.0 : l2_norm(lhs) / fn;
}

double check_duality(const ResolventOperator& op, const ScalarField& f, const ScalarField& g) {
  ScalarField gf = op.apply(f);
  ScalarField gadj = op.apply_adjoint(g);
  const Eigen::SparseMatrix<double>& M = op.form().M;
  double lhs = g.v.dot(M * gf.v);   // <G f, g>
  double rhs = gadj.v.dot(M * f.v); // <f, G^ g>
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

bool pencil_is_m_matrix(const Eigen::SparseMatrix<double>& P, double tol) {
  for (int k = 0; k < P.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(P, k); it; ++it) {
      if (it.row() == it.col()) {
        if (it.value() <= 0.0) return false;
      } else if (it.value() > tol) {
        return false;
      }
    }
  return true;
}

OrderReport check_order_preservation(const ResolventOperator& op, const ScalarField& f01) {
  OrderReport r;
  ScalarField u = op.apply(f01);
  Eigen::VectorXd scaled = op.lambda() * u.v;
  r.min_value = std::min(0.0, scaled.minCoeff());  // boundary values are 0
  r.max_value = std::max(0.0, scaled.maxCoeff());
  r.m_matrix = pencil_is_m_matrix(op.form().pencil());
  return r;
}

AprioriReport check_apriori(const ScalarField& u, const ScalarField& f, double kappa1_exact) {
  AprioriReport r;
  r.lhs = h1_norm(u);
  if (kappa1_exact > 0.0) {
    r.rhs = friedrichs_constant() * l2_norm(f) / kappa1_exact;
    r.pass = r.lhs <= r.rhs;
  }
  return r;
}

}  // namespace homog
