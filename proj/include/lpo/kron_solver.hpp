// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_KRON_SOLVER_HPP
#define LPO_KRON_SOLVER_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "lpo/cp_tensor.hpp"

namespace lpo {

/// Spectral summary of a Hurwitz matrix: the negated real parts of the
/// spectrum lie in [lambda_min, lambda_max], imaginary parts in [-mu, mu].
/// kappa_x estimates the 2-norm condition of the eigenvector matrix
/// (exactly 1 for symmetric A).
struct SpectralBox {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double mu = 0.0;
  double kappa_x = 1.0;
  bool symmetric = false;
};

/// Sinc-type quadrature for the operator integral on (0, inf) whose
/// integrand decays like exp(-k * lambda_min * t).  With h = pi/sqrt(ell),
/// for i = -ell..ell:
///   node_i   = log(exp(i h) + sqrt(1 + exp(2 i h))) / (k lambda_min)
///   weight_i = h / (sqrt(1 + exp(-2 i h)) * k lambda_min)
/// Nodes are strictly increasing and positive; weights are positive.
struct QuadratureRule {
  int ell = 0;
  int order = 0;
  double lambda_min = 0.0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Result of the accuracy-driven level selection.
struct EllChoice {
  int ell = 1;
  bool capped = false;
};

/// Per-degree build record for build_observability_coefficients.
struct CoefficientInfo {
  int k = 0;
  int ell = 0;
  bool capped = false;
  int rhs_rank = 0;
  int rank = 0;
};

struct ObservabilityCoefficients {
  std::map<int, CpVector> w;  // degree k -> coefficient, k = 2..2d
  std::vector<CoefficientInfo> info;
};

struct CoefficientBuildOptions {
  double tol = 1e-8;
  int ell_override = -1;  // > 0 forces the quadrature level for every degree
  bool even_only = false;
  bool compress = true;
  // > 0 replaces the estimated eigenbasis condition number in the level
  // heuristic.  Used when A is a similarity transform of a better-known
  // matrix: eigenvalues (and hence the decay box) are invariant, but the
  // transformed eigenbasis condition would needlessly inflate the level.
  double kappa_x_override = -1.0;
};

/// Computes the spectral box of A.  Throws validation_error when A is not
/// Hurwitz.  kappa_x is a power-iteration estimate, not a tight bound.
SpectralBox estimate_spectral_box(const Eigen::MatrixXd& A);

/// Smallest ell whose a-priori error bound
///   kappa_x^k / (k lambda_min) * exp(mu / (lambda_min pi)) * exp(-pi sqrt(ell))
/// falls below tol (bound constant taken as 1), capped at 200.
EllChoice choose_ell(const SpectralBox& box, int k, double tol);

/// Builds the quadrature rule for the given level, tensor order, and decay.
QuadratureRule quadrature_rule(int ell, int k, double lambda_min);

/// Minimal right-hand side for the degree-k coefficient equation, built
/// from the output coefficients (outputs[i] has order i+1):
///   odd  k = 2K+1:  2 * sum_{i=1..K} c_i (x) c_{k-i}
///   even k = 2K:    c_K (x) c_K + 2 * sum_{i=1..K-1} c_i (x) c_{k-i},
/// dropping terms whose factors are absent or zero.  The sign convention is
/// positive; the solver applies the minus sign.
CpVector assemble_rhs(const std::vector<CpVector>& outputs, int k);

/// Applies exp(a A^T) to tall real matrices for many scalars a, reusing one
/// spectral decomposition of A.  Falls back to a Schur form with dense
/// exponentials of the triangular factor when the eigenbasis condition
/// exceeds kappa_limit.  Throws validation_error when A is not Hurwitz.
class TransposedExponential {
 public:
  explicit TransposedExponential(const Eigen::MatrixXd& A, double kappa_limit = 1e8);

  /// exp(a A^T) * V.
  Eigen::MatrixXd apply(double a, const Eigen::MatrixXd& V) const;

  /// Basis-transformed copy of V for repeated applications.
  Eigen::MatrixXcd prepare(const Eigen::MatrixXd& V) const;

  /// exp(a A^T) * V given prepare(V).
  Eigen::MatrixXd apply_prepared(double a, const Eigen::MatrixXcd& prepared) const;

  bool schur_path() const { return use_schur_; }
  int dim() const { return n_; }

 private:
  int n_ = 0;
  bool use_schur_ = false;
  Eigen::VectorXcd eigvals_;
  Eigen::MatrixXcd xt_;  // X^T where A = X D X^{-1}
  Eigen::PartialPivLU<Eigen::MatrixXcd> xt_lu_;
  Eigen::MatrixXd z_, s_;  // A^T = Z S Z^T (real Schur)
};

/// Low-rank quadrature solution of the Kronecker-sum equation
///   (sum_j I (x) ... (x) A^T (slot j) (x) ... (x) I) w = -rhs
/// via w ~= sum_i weight_i (exp(node_i A^T) (x) ... ) rhs.
/// Output rank is (2 ell + 1) * rank(rhs); node order is fixed (increasing)
/// so results are bit-reproducible.
CpVector solve_kron_lowrank(const Eigen::MatrixXd& A, const CpVector& rhs,
                            const QuadratureRule& rule);
CpVector solve_kron_lowrank(const TransposedExponential& expA, const CpVector& rhs,
                            const QuadratureRule& rule);

/// Runs the full coefficient pipeline for degrees k = 2..2d: assembles the
/// minimal right-hand side, picks the level per degree from one spectral
/// box, and solves with one shared decomposition of A.
ObservabilityCoefficients build_observability_coefficients(
    const Eigen::MatrixXd& A, const std::vector<CpVector>& outputs,
    const CoefficientBuildOptions& opts = {});

}  // namespace lpo

#endif  // LPO_KRON_SOLVER_HPP
