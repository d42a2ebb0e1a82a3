#include "nozzleflow/linear_solve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <vector>

namespace nozzleflow {

LinearSolveResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, double rel_tol,
                                     int max_iterations) {
  const Eigen::Index n = b.size();
  if (max_iterations < 0) max_iterations = static_cast<int>(std::max<Eigen::Index>(10 * n, 100));
  LinearSolveResult out;
  out.x = Eigen::VectorXd::Zero(n);
  out.ritz_min = out.ritz_max = std::numeric_limits<double>::quiet_NaN();
  const double b_norm = b.norm();
  if (b_norm == 0) {
    out.converged = true;
    return out;
  }
  const Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd Ap(n);
  double rz = r.dot(z);
  std::vector<double> alphas, betas;
  for (int it = 0; it < max_iterations; ++it) {
    Ap.noalias() = A * p;
    const double curvature = p.dot(Ap);
    if (!(curvature > 0)) break;
    const double alpha = rz / curvature;
    out.x.noalias() += alpha * p;
    r.noalias() -= alpha * Ap;
    alphas.push_back(alpha);
    out.iterations = it + 1;
    out.relative_residual = r.norm() / b_norm;
    if (out.relative_residual <= rel_tol) {
      out.converged = true;
      break;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    const double beta = rz_next / rz;
    betas.push_back(beta);
    rz = rz_next;
    p = z + beta * p;
  }

  const int k = static_cast<int>(alphas.size());
  if (k > 0) {
    Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
    for (int j = 0; j < k; ++j) {
      diag(j) = 1 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
      if (j + 1 < k) sub(j) = std::sqrt(betas[j]) / alphas[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    out.ritz_min = eig.eigenvalues().minCoeff();
    out.ritz_max = eig.eigenvalues().maxCoeff();
  }
  return out;
}

LinearSolveResult direct_solve(const SparseMatrix& A, const Eigen::VectorXd& b) {
  LinearSolveResult out;
  const Eigen::SparseMatrix<double> colmajor = A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(colmajor);
  if (ldlt.info() != Eigen::Success) {
    out.x = Eigen::VectorXd::Zero(b.size());
    return out;
  }
  out.ritz_min = ldlt.vectorD().minCoeff();
  out.ritz_max = ldlt.vectorD().maxCoeff();
  out.x = ldlt.solve(b);
  const double b_norm = b.norm();
  out.relative_residual = b_norm > 0 ? (A * out.x - b).norm() / b_norm : 0.0;
  out.converged = out.ritz_min > 0;
  out.iterations = 1;
  return out;
}

}  // namespace nozzleflow
