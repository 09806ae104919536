// Copyright 2026 The settle Authors
// SPDX-License-Identifier: Apache-2.0

#include "settle/linsolve.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <chrono>
#include <string>
#include <vector>

#include "settle/error.hpp"

namespace settle::linsolve {

namespace {

// b - (A + A_low) x accumulated in extended precision.
Eigen::VectorXd residual(const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>* A_low,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  std::vector<long double> acc(static_cast<std::size_t>(b.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i) acc[i] = b[i];
  auto subtract = [&](const Eigen::SparseMatrix<double>& M) {
    for (Eigen::Index c = 0; c < M.outerSize(); ++c) {
      const long double xc = x[c];
      for (Eigen::SparseMatrix<double>::InnerIterator it(M, c); it; ++it)
        acc[it.row()] -= static_cast<long double>(it.value()) * xc;
    }
  };
  subtract(A);
  if (A_low) subtract(*A_low);
  Eigen::VectorXd r(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) r[i] = static_cast<double>(acc[i]);
  return r;
}

}  // namespace

SolveResult solve_sparse(const Eigen::SparseMatrix<double>& A_in, const Eigen::VectorXd& b, const SolveOptions& options,
                         const Eigen::SparseMatrix<double>* A_low) {
  const auto t0 = std::chrono::steady_clock::now();
  if (A_in.rows() != A_in.cols()) throw SolveError("solve: matrix is not square");
  if (A_in.rows() != b.size()) throw SolveError("solve: right-hand side size does not match the matrix");
  if (A_low && (A_low->rows() != A_in.rows() || A_low->cols() != A_in.cols()))
    throw SolveError("solve: correction matrix shape does not match");
  SolveResult out;
  if (A_in.rows() == 0) {
    out.x.resize(0);
    return out;
  }
  Eigen::SparseMatrix<double> A = A_in;
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolveError("solve: factorization failed: " + lu.lastErrorMessage());
  out.report.factor_nnz = static_cast<std::size_t>(lu.nnzL() + lu.nnzU());

  out.x = lu.solve(b);
  if (lu.info() != Eigen::Success || !out.x.allFinite()) throw SolveError("solve: non-finite solution");
  const double bn = b.norm();
  Eigen::VectorXd r = residual(A, A_low, out.x, b);
  for (int step = 0; step < options.refinement_steps; ++step) {
    if (r.norm() <= 1e-17 * bn) break;
    out.x += lu.solve(r);
    r = residual(A, A_low, out.x, b);
  }
  if (!out.x.allFinite()) throw SolveError("solve: non-finite solution");

  const double rn = r.norm();
  out.report.residual_norm = bn > 0.0 ? rn / bn : rn;
  out.report.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!(out.report.residual_norm <= options.max_residual)) {
    throw SolveError("solve: relative residual " + std::to_string(out.report.residual_norm) + " exceeds tolerance");
  }
  return out;
}

SolveResult solve_sparse(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Eigen::VectorXd& b,
                         const SolveOptions& options, const Eigen::SparseMatrix<double, Eigen::RowMajor>* A_low) {
  if (!A_low) return solve_sparse(Eigen::SparseMatrix<double>(A), b, options);
  const Eigen::SparseMatrix<double> low(*A_low);
  return solve_sparse(Eigen::SparseMatrix<double>(A), b, options, &low);
}

}  // namespace settle::linsolve
