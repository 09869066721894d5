#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Sparse>

namespace dgflow {

/// Sparse LU (UMFPACK) with iterative refinement. The symbolic analysis is
/// reused while the sparsity pattern of successive matrices is unchanged.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Solves A x = b. Throws LinearSolveFailed when the factorization reports
  /// a singular matrix or the refined relative residual stays above
  /// `failure_threshold`.
  Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

  /// Factorize once, then call solve_factored for several right-hand sides.
  void factorize(const Eigen::SparseMatrix<double>& A);
  Eigen::VectorXd solve_factored(const Eigen::VectorXd& b);

  double last_relative_residual() const { return last_residual_; }
  int analyses() const { return analyses_; }

  double target = 1e-12;             // refinement stops below this
  double failure_threshold = 1e-8;   // error above this
  int max_refinements = 3;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double last_residual_ = 0.0;
  int analyses_ = 0;
};

}  // namespace dgflow
