#pragma once
/// @file eigs.hpp
/// @brief Symmetric-pencil extremal eigenvalue estimates used by the form and
///        effective-coefficient diagnostics. Power/inverse iterations in the
///        mass inner product; deterministic seeded starts.

#include <cstdint>

#include <Eigen/SparseCore>

namespace homog {

/// Largest eigenvalue of the pencil (H, M): H symmetric, M symmetric positive
/// definite. Shifted power iteration (the shift keeps the dominant eigenvalue
/// the algebraic maximum rather than the largest magnitude).
double pencil_max_eig(const Eigen::SparseMatrix<double>& H, const Eigen::SparseMatrix<double>& M,
                      std::uint64_t seed, int iters = 600, double tol = 1e-12);

/// Smallest eigenvalue of the pencil (S, T): S symmetric positive definite,
/// T symmetric positive definite. Inverse iteration v <- S^{-1} T v.
double pencil_min_eig(const Eigen::SparseMatrix<double>& S, const Eigen::SparseMatrix<double>& T,
                      std::uint64_t seed, int iters = 300, double tol = 1e-12);

}  // namespace homog
