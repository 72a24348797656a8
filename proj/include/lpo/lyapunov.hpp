// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_LYAPUNOV_HPP
#define LPO_LYAPUNOV_HPP

#include <Eigen/Dense>

namespace lpo {

/// Controllability Gramian with its Cholesky factor, P = R R^T (R lower).
struct GramianPair {
  Eigen::MatrixXd P;
  Eigen::MatrixXd R;
};

/// Largest real part over the spectrum of A.
double spectral_abscissa(const Eigen::MatrixXd& A);

/// Throws validation_error naming the offending eigenvalue unless every
/// eigenvalue of A has negative real part.
void require_hurwitz(const Eigen::MatrixXd& A, const char* context);

/// Solves A P + P A^T + B B^T = 0 for Hurwitz A via real Schur reduction and
/// block back-substitution, then factors P.  Throws validation_error for
/// unstable A and numerical_error when P is numerically singular.
GramianPair solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Solves the dual equation A^T W + W A + C C^T = 0 (C is n x p).
Eigen::MatrixXd solve_lyapunov_dual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// Lower Cholesky factor of a symmetric positive definite matrix; the input
/// is symmetrized first.  Throws numerical_error when the factorization
/// breaks down.
Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& P);

/// Solves T Y + Y T^T + C = 0 for quasi-upper-triangular T (real Schur form).
/// Exposed for testing; callers normally use solve_lyapunov.
Eigen::MatrixXd lyapunov_quasi_triangular(const Eigen::MatrixXd& T, const Eigen::MatrixXd& C);

}  // namespace lpo

#endif  // LPO_LYAPUNOV_HPP
