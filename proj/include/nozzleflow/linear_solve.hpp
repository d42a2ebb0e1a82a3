#pragma once

#include <Eigen/Dense>

#include "nozzleflow/mesh.hpp"

namespace nozzleflow {

struct LinearSolveResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0;
  bool converged = false;
  /// Extreme Ritz values of the Jacobi-preconditioned operator, from the
  /// Lanczos tridiagonal implied by the CG coefficients (NaN if no step).
  double ritz_min = 0;
  double ritz_max = 0;
};

/// Conjugate gradients with a diagonal (Jacobi) preconditioner. Stops on
/// ||r|| <= rel_tol ||b|| or on non-positive curvature (converged = false).
LinearSolveResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, double rel_tol = 1e-12,
                                     int max_iterations = -1);

/// Sparse LDL^T factorisation; converged = false if A is not positive definite.
/// ritz_min/ritz_max hold the extreme pivots of D.
LinearSolveResult direct_solve(const SparseMatrix& A, const Eigen::VectorXd& b);

}  // namespace nozzleflow
