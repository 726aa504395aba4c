#include "hrks/solver.hpp"

#include <Eigen/SparseLU>
#include <Eigen/SparseCholesky>

namespace hrks {

namespace {

constexpr double kResidualTol = 1e-9;

double rel_residual(const SparseMatrix& k, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b) {
  return (k.multiply(x) - b).norm() / b.norm();
}

}  // namespace

Eigen::VectorXd solve_sparse(const SparseMatrix& k, const Eigen::VectorXd& b,
                             SolveReport* report) {
  if (k.rows != k.cols || k.rows != b.size())
    throw SolverError("solve_sparse: shape mismatch");
  if (b.norm() == 0.0) {
    if (report) *report = {k.rows, 0.0};
    return Eigen::VectorXd::Zero(k.rows);
  }
  const Eigen::SparseMatrix<double> a = k.to_eigen();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_sparse: factorization failed (singular system?)");
  Eigen::VectorXd x = lu.solve(b);
  double res = rel_residual(k, x, b);
  if (res > kResidualTol) {
    x += lu.solve(Eigen::VectorXd(b - k.multiply(x)));  // one refinement step
    res = rel_residual(k, x, b);
  }
  if (report) *report = {k.rows, res};
  if (res > kResidualTol)
    throw SolverError("solve_sparse: residual target unmet, achieved " +
                      std::to_string(res));
  return x;
}

Eigen::VectorXd solve_spd(const SparseMatrix& k, const Eigen::VectorXd& b,
                          SolveReport* report) {
  if (k.rows != k.cols || k.rows != b.size())
    throw SolverError("solve_spd: shape mismatch");
  const Eigen::SparseMatrix<double> a = k.to_eigen();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(a);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
    throw SolverError("solve_spd: nonpositive pivot");
  if (b.norm() == 0.0) {
    if (report) *report = {k.rows, 0.0};
    return Eigen::VectorXd::Zero(k.rows);
  }
  Eigen::VectorXd x = ldlt.solve(b);
  double res = rel_residual(k, x, b);
  if (res > kResidualTol) {
    x += ldlt.solve(Eigen::VectorXd(b - k.multiply(x)));
    res = rel_residual(k, x, b);
  }
  if (report) *report = {k.rows, res};
  if (res > kResidualTol)
    throw SolverError("solve_spd: residual target unmet, achieved " +
                      std::to_string(res));
  return x;
}

Eigen::VectorXd solve_dense(const Eigen::MatrixXd& k, const Eigen::VectorXd& b) {
  return k.partialPivLu().solve(b);
}

}  // namespace hrks
