// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/lyapunov.hpp"

#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lpo/errors.hpp"

namespace lpo {

namespace {

// Diagonal block boundaries of a quasi-upper-triangular matrix.
std::vector<std::pair<int, int>> schur_blocks(const Eigen::MatrixXd& T) {
  const int n = static_cast<int>(T.rows());
  std::vector<std::pair<int, int>> blocks;
  int i = 0;
  while (i < n) {
    const int size = (i + 1 < n && T(i + 1, i) != 0.0) ? 2 : 1;
    blocks.emplace_back(i, size);
    i += size;
  }
  return blocks;
}

}  // namespace

double spectral_abscissa(const Eigen::MatrixXd& A) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().real().maxCoeff();
}

void require_hurwitz(const Eigen::MatrixXd& A, const char* context) {
  const auto eigs = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
  int worst = 0;
  for (int i = 1; i < eigs.size(); ++i)
    if (eigs(i).real() > eigs(worst).real()) worst = i;
  if (eigs(worst).real() >= 0.0)
    throw validation_error(std::string(context) + ": matrix is not Hurwitz, eigenvalue " +
                           std::to_string(eigs(worst).real()) + " + " +
                           std::to_string(eigs(worst).imag()) + "i has nonnegative real part");
}

Eigen::MatrixXd lyapunov_quasi_triangular(const Eigen::MatrixXd& T, const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(T.rows());
  if (T.cols() != n || C.rows() != n || C.cols() != n)
    throw validation_error("lyapunov_quasi_triangular: square inputs of equal size required");
  const auto blocks = schur_blocks(T);
  const int nb = static_cast<int>(blocks.size());
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);

  // T Y + Y T^T = -C, processed from the trailing block column/row upward so
  // every sum on the right-hand side only touches solved blocks.
  for (int qb = nb - 1; qb >= 0; --qb) {
    const auto [q0, qs] = blocks[qb];
    for (int pb = nb - 1; pb >= 0; --pb) {
      const auto [p0, ps] = blocks[pb];
      Eigen::MatrixXd rhs = -C.block(p0, q0, ps, qs);
      const int ptail = p0 + ps;
      const int qtail = q0 + qs;
      if (ptail < n)
        rhs.noalias() -= T.block(p0, ptail, ps, n - ptail) * Y.block(ptail, q0, n - ptail, qs);
      if (qtail < n)
        rhs.noalias() -= Y.block(p0, qtail, ps, n - qtail) * T.block(q0, qtail, qs, n - qtail).transpose();

      // Small Sylvester system (at most 4 unknowns):
      // (I (x) T_pp + T_qq (x) I) vec(Y_pq) = vec(rhs), vec column-major.
      const Eigen::MatrixXd Tpp = T.block(p0, p0, ps, ps);
      const Eigen::MatrixXd Tqq = T.block(q0, q0, qs, qs);
      Eigen::MatrixXd small = Eigen::MatrixXd::Zero(ps * qs, ps * qs);
      for (int a = 0; a < qs; ++a) small.block(a * ps, a * ps, ps, ps) += Tpp;
      for (int a = 0; a < qs; ++a)
        for (int b = 0; b < qs; ++b)
          small.block(a * ps, b * ps, ps, ps) +=
              Tqq(a, b) * Eigen::MatrixXd::Identity(ps, ps);
      const Eigen::VectorXd vec_rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), ps * qs);
      const Eigen::VectorXd sol = small.partialPivLu().solve(vec_rhs);
      Y.block(p0, q0, ps, qs) = Eigen::Map<const Eigen::MatrixXd>(sol.data(), ps, qs);
    }
  }
  return Y;
}

GramianPair solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw validation_error("solve_lyapunov: A must be square");
  if (B.rows() != n) throw validation_error("solve_lyapunov: B row count must match A");
  require_hurwitz(A, "solve_lyapunov");

  Eigen::RealSchur<Eigen::MatrixXd> schur(A);
  const Eigen::MatrixXd& U = schur.matrixU();
  const Eigen::MatrixXd& T = schur.matrixT();
  const Eigen::MatrixXd C = U.transpose() * (B * B.transpose()) * U;
  const Eigen::MatrixXd Y = lyapunov_quasi_triangular(T, C);
  Eigen::MatrixXd P = U * Y * U.transpose();
  P = 0.5 * (P + P.transpose());

  GramianPair out;
  out.P = std::move(P);
  out.R = cholesky_spd(out.P);
  return out;
}

Eigen::MatrixXd solve_lyapunov_dual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw validation_error("solve_lyapunov_dual: A must be square");
  if (C.rows() != n) throw validation_error("solve_lyapunov_dual: C row count must match A");
  require_hurwitz(A, "solve_lyapunov_dual");

  const Eigen::MatrixXd At = A.transpose();
  Eigen::RealSchur<Eigen::MatrixXd> schur(At);
  const Eigen::MatrixXd& U = schur.matrixU();
  const Eigen::MatrixXd& T = schur.matrixT();
  const Eigen::MatrixXd Crot = U.transpose() * (C * C.transpose()) * U;
  const Eigen::MatrixXd Y = lyapunov_quasi_triangular(T, Crot);
  Eigen::MatrixXd W = U * Y * U.transpose();
  return 0.5 * (W + W.transpose());
}

Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols()) throw validation_error("cholesky_spd: matrix must be square");
  const Eigen::MatrixXd S = 0.5 * (P + P.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw numerical_error("cholesky_spd: matrix is numerically singular or indefinite");
  return llt.matrixL();
}

}  // namespace lpo
