#pragma once

#include <stdexcept>

#include "hrks/sparse.hpp"

namespace hrks {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveReport {
  int n = 0;
  double rel_residual = 0.0;
};

/// Sparse direct solve for square (possibly indefinite) systems. Throws
/// SolverError if the relative residual ||Kx-b||/||b|| exceeds 1e-9 after one
/// refinement step. Deterministic for identical input.
Eigen::VectorXd solve_sparse(const SparseMatrix& k, const Eigen::VectorXd& b,
                             SolveReport* report = nullptr);

/// Sparse LDL^T for symmetric positive definite systems; a nonpositive pivot
/// is reported as a SolverError since it signals a broken space.
Eigen::VectorXd solve_spd(const SparseMatrix& k, const Eigen::VectorXd& b,
                          SolveReport* report = nullptr);

/// Dense factorization, used as an oracle by the tests.
Eigen::VectorXd solve_dense(const Eigen::MatrixXd& k, const Eigen::VectorXd& b);

}  // namespace hrks
