// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_STIEFEL_OPT_HPP
#define LPO_STIEFEL_OPT_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace lpo {

/// Orthonormal n x r frame, validated on construction (Gram deviation of at
/// most 1e-10 in Frobenius norm).
struct StiefelPoint {
  Eigen::MatrixXd Q;

  int n() const { return static_cast<int>(Q.rows()); }
  int r() const { return static_cast<int>(Q.cols()); }
};

StiefelPoint make_stiefel_point(Eigen::MatrixXd Q);

struct OptimizerConfig {
  int max_iters = 500;
  double grad_tol = 1e-8;     // on the Frobenius norm of the tangent gradient
  double initial_step = 1.0;
  double backtracking = 0.5;  // step shrink factor, in (0, 1)
  double armijo = 1e-4;       // sufficient-increase constant, in (0, 1)
};

/// Orthogonal projection onto the tangent space at Q:
///   P_Q(G) = G - Q (Q^T G + G^T Q) / 2.
Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& G);

/// QR retraction: the thin-QR orthonormal factor of Q + X with the sign of
/// each column fixed so the triangular factor has positive diagonal.  For
/// tangent X it agrees with Q + X to second order in ||X||.
Eigen::MatrixXd retract_qr(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X);

using ObjectiveFn = std::function<double(const Eigen::MatrixXd&)>;
using GradientFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

struct OptimizeReport {
  StiefelPoint point;
  double objective = 0.0;
  double grad_norm = 0.0;       // tangent gradient norm at the final iterate
  int iterations = 0;           // accepted ascent steps
  // converged: grad_norm fell below grad_tol, or the predicted increase
  // dropped beneath the floating-point resolution of the objective.
  bool converged = false;
  // stalled: 50 halvings failed although the full step predicted a
  // resolvable increase (objective/gradient inconsistency or severe
  // curvature).
  bool stalled = false;
  std::vector<double> trace;    // objective at the start and after each step
};

/// Riemannian gradient ascent with Armijo backtracking: steps along the
/// projected gradient, retracts with retract_qr, and accepts once
///   f(Q+) >= f(Q) + armijo * t * ||grad||_F^2.
/// The objective trace is non-decreasing.  Stops when the tangent gradient
/// norm falls below grad_tol (converged), when 50 halvings fail to produce
/// an increase (stalled), or after max_iters accepted steps.
OptimizeReport maximize_on_stiefel(const ObjectiveFn& f, const GradientFn& g,
                                   const StiefelPoint& Q0, const OptimizerConfig& cfg = {});

}  // namespace lpo

#endif  // LPO_STIEFEL_OPT_HPP
