// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/stiefel_opt.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lpo/errors.hpp"

namespace lpo {

namespace {

constexpr int kMaxHalvings = 50;

void check_config(const OptimizerConfig& cfg) {
  if (cfg.max_iters < 1) throw validation_error("stiefel: max_iters must be >= 1");
  if (!(cfg.grad_tol > 0.0)) throw validation_error("stiefel: grad_tol must be positive");
  if (!(cfg.initial_step > 0.0)) throw validation_error("stiefel: initial_step must be positive");
  if (!(cfg.backtracking > 0.0 && cfg.backtracking < 1.0))
    throw validation_error("stiefel: backtracking factor must lie in (0, 1)");
  if (!(cfg.armijo > 0.0 && cfg.armijo < 1.0))
    throw validation_error("stiefel: armijo constant must lie in (0, 1)");
}

}  // namespace

StiefelPoint make_stiefel_point(Eigen::MatrixXd Q) {
  if (Q.rows() < 1 || Q.cols() < 1 || Q.cols() > Q.rows())
    throw validation_error("stiefel: Q must be a tall n x r frame");
  const int r = static_cast<int>(Q.cols());
  const double dev =
      (Q.transpose() * Q - Eigen::MatrixXd::Identity(r, r)).norm();
  if (dev > 1e-10)
    throw validation_error("stiefel: Q is not orthonormal (Gram deviation " +
                           std::to_string(dev) + ")");
  return StiefelPoint{std::move(Q)};
}

Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& G) {
  if (G.rows() != Q.rows() || G.cols() != Q.cols())
    throw validation_error("tangent_project: G must match the shape of Q");
  const Eigen::MatrixXd QtG = Q.transpose() * G;
  return G - Q * (0.5 * (QtG + QtG.transpose()));
}

Eigen::MatrixXd retract_qr(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X) {
  if (X.rows() != Q.rows() || X.cols() != Q.cols())
    throw validation_error("retract_qr: X must match the shape of Q");
  const int n = static_cast<int>(Q.rows());
  const int r = static_cast<int>(Q.cols());
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q + X);
  Eigen::MatrixXd thin =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int j = 0; j < r; ++j)
    if (R(j, j) < 0.0) thin.col(j) = -thin.col(j);
  return thin;
}

OptimizeReport maximize_on_stiefel(const ObjectiveFn& f, const GradientFn& g,
                                   const StiefelPoint& Q0, const OptimizerConfig& cfg) {
  check_config(cfg);
  if (!f || !g) throw validation_error("stiefel: objective and gradient must be callable");

  OptimizeReport report;
  Eigen::MatrixXd Q = Q0.Q;
  double value = f(Q);
  report.trace.push_back(value);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::MatrixXd T = tangent_project(Q, g(Q));
    report.grad_norm = T.norm();
    if (report.grad_norm <= cfg.grad_tol) {
      report.converged = true;
      break;
    }
    const double slope = report.grad_norm * report.grad_norm;

    // Backtracking from the full step.  The increase is tested as a
    // difference so the (possibly tiny) Armijo margin is never rounded away
    // against the objective value.
    double t = cfg.initial_step;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      const Eigen::MatrixXd candidate = retract_qr(Q, t * T);
      const double candidate_value = f(candidate);
      if (candidate_value - value >= cfg.armijo * t * slope) {
        Q = candidate;
        value = candidate_value;
        accepted = true;
        break;
      }
      t *= cfg.backtracking;
    }
    if (!accepted) {
      // If even the full step's Armijo margin is beneath the floating-point
      // resolution of f, the objective has nothing measurable left to gain:
      // that is numerical stationarity, not a line-search failure.
      const double resolution =
          8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(value));
      if (cfg.armijo * cfg.initial_step * slope < resolution) {
        report.converged = true;
      } else {
        report.stalled = true;
      }
      break;
    }
    report.iterations += 1;
    report.trace.push_back(value);
  }

  if (!report.converged && !report.stalled) {
    // Ran out of iterations; recompute the gradient norm at the final point.
    report.grad_norm = tangent_project(Q, g(Q)).norm();
    report.converged = report.grad_norm <= cfg.grad_tol;
  }
  report.point = make_stiefel_point(std::move(Q));
  report.objective = value;
  return report;
}

}  // namespace lpo
