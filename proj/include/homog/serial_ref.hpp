#pragma once
/// @file serial_ref.hpp
/// @brief Plain single-threaded reference implementations of the parallel
///        kernels. Kept for testing (bitwise/1e-13 agreement with the OpenMP
///        paths) and timed against them by the benchmark target.

#include <Eigen/SparseCore>

#include "homog/forms.hpp"
#include "homog/grid.hpp"

namespace homog::serial {

double integrate(const ScalarField& u);
double l2_norm_sq(const ScalarField& u);
double h1_seminorm_sq(const ScalarField& u);

Eigen::SparseMatrix<double> assemble_matrix(const Grid& g, const PointSampler& s);
Eigen::SparseMatrix<double> assemble_mass(const Grid& g);

}  // namespace homog::serial
