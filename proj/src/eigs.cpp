#include "homog/eigs.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "homog/common.hpp"

namespace homog {

namespace {

Eigen::VectorXd random_start(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

double pencil_max_eig(const Eigen::SparseMatrix<double>& H, const Eigen::SparseMatrix<double>& M,
                      std::uint64_t seed, int iters, double tol) {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(M);
  if (llt.info() != Eigen::Success)
    throw solver_error("mass factorization failed in pencil eigenvalue estimate");
  auto m_norm = [&](const Eigen::VectorXd& w) { return std::sqrt(w.dot(M * w)); };

  Eigen::VectorXd v = random_start(H.rows(), seed);
  v /= m_norm(v);

  // Crude spectral-radius bound of M^{-1} H for the shift: iterate a few
  // steps; each M-norm growth factor is at most the radius.
  double rho = 0.0;
  for (int it = 0; it < 40; ++it) {
    Eigen::VectorXd w = llt.solve(H * v);
    double nm = m_norm(w);
    if (nm == 0.0) break;
    rho = std::max(rho, nm);
    v = w / nm;
  }
  const double sigma = 1.1 * rho + 1.0;

  // Shifted power iteration: dominant eigenvalue of M^{-1}(H + sigma M) is the
  // algebraic maximum plus sigma.
  double rq = v.dot(H * v);
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = llt.solve(H * v) + sigma * v;
    double nm = m_norm(w);
    if (nm == 0.0) break;
    v = w / nm;
    double next = v.dot(H * v) / v.dot(M * v);
    bool converged = std::abs(next - rq) <= tol * std::max(1.0, std::abs(next));
    rq = next;
    if (converged) break;
  }
  return rq;
}

double pencil_min_eig(const Eigen::SparseMatrix<double>& S, const Eigen::SparseMatrix<double>& T,
                      std::uint64_t seed, int iters, double tol) {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(S);
  if (llt.info() != Eigen::Success)
    throw solver_error("pencil minimum requested for a matrix that is not positive definite");
  auto t_norm = [&](const Eigen::VectorXd& w) { return std::sqrt(w.dot(T * w)); };

  Eigen::VectorXd v = random_start(S.rows(), seed);
  v /= t_norm(v);
  double rq = v.dot(S * v) / v.dot(T * v);
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = llt.solve(T * v);
    double nm = t_norm(w);
    if (nm == 0.0) break;
    v = w / nm;
    double next = v.dot(S * v) / v.dot(T * v);
    bool converged = std::abs(next - rq) <= tol * std::max(1.0, std::abs(next));
    rq = next;
    if (converged) break;
  }
  return rq;
}

}  // namespace homog
