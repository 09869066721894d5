#include "dgflow/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/UmfPackSupport>

#include "dgflow/error.hpp"

namespace dgflow {

struct LinearSolver::Impl {
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  Eigen::SparseMatrix<double> matrix;
  std::vector<int> outer;
  std::vector<int> inner;
  bool analyzed = false;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const Eigen::SparseMatrix<double>& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::InvalidArgument, "linear solve needs a square matrix");
  Impl& s = *impl_;
  s.matrix = A;
  s.matrix.makeCompressed();
  const int n = static_cast<int>(s.matrix.cols());
  const int nnz = static_cast<int>(s.matrix.nonZeros());
  const int* op = s.matrix.outerIndexPtr();
  const int* ip = s.matrix.innerIndexPtr();
  const bool same = s.analyzed && static_cast<int>(s.outer.size()) == n + 1 &&
                    static_cast<int>(s.inner.size()) == nnz &&
                    std::equal(op, op + n + 1, s.outer.begin()) &&
                    std::equal(ip, ip + nnz, s.inner.begin());
  if (!same) {
    s.lu.analyzePattern(s.matrix);
    if (s.lu.info() != Eigen::Success) {
      throw Error(ErrorCode::LinearSolveFailed, "linear solve failed: symbolic analysis rejected the matrix");
    }
    s.outer.assign(op, op + n + 1);
    s.inner.assign(ip, ip + nnz);
    s.analyzed = true;
    ++analyses_;
  }
  s.lu.factorize(s.matrix);
  if (s.lu.info() != Eigen::Success) {
    throw Error(ErrorCode::LinearSolveFailed, "linear solve failed: matrix is singular to working precision");
  }
}

Eigen::VectorXd LinearSolver::solve_factored(const Eigen::VectorXd& b) {
  Impl& s = *impl_;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    last_residual_ = 0.0;
    return Eigen::VectorXd::Zero(b.size());
  }
  Eigen::VectorXd x = s.lu.solve(b);
  Eigen::VectorXd r = b - s.matrix * x;
  double rel = r.norm() / bnorm;
  for (int it = 0; it < max_refinements && rel > target && std::isfinite(rel); ++it) {
    x += s.lu.solve(r);
    r = b - s.matrix * x;
    rel = r.norm() / bnorm;
  }
  last_residual_ = rel;
  if (!std::isfinite(rel) || rel > failure_threshold) {
    std::ostringstream msg;
    msg << "linear solve failed: relative residual " << rel << " after refinement";
    throw Error(ErrorCode::LinearSolveFailed, msg.str());
  }
  return x;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  factorize(A);
  return solve_factored(b);
}

}  // namespace dgflow
