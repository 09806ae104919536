// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0
//
// Direct sparse LU solve with fill-reducing column ordering and a residual check.
#pragma once

#include <cstddef>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace settle::linsolve {

struct SolveReport {
  double residual_norm = 0.0;  // ||Ax - b|| / ||b||, or ||Ax - b|| when b = 0
  std::size_t factor_nnz = 0;  // nonzeros in L + U
  double elapsed = 0.0;        // seconds
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

struct SolveOptions {
  double max_residual = 1e-8;
  /// Steps of iterative refinement with the computed factors.
  int refinement_steps = 3;
};

/// Factorizes A and refines against A + A_low (when given) with residuals
/// accumulated in extended precision. Throws SolveError on shape mismatch,
/// singular factorization (carrying the factorization's pivot diagnostic),
/// non-finite solution, or relative residual above `max_residual`.
SolveResult solve_sparse(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                         const SolveOptions& options = {}, const Eigen::SparseMatrix<double>* A_low = nullptr);
SolveResult solve_sparse(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& b,
                         const SolveOptions& options = {},
                         const Eigen::SparseMatrix<double, Eigen::RowMajor>* A_low = nullptr);

}  // namespace settle::linsolve
