// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/energy.hpp"

#include <string>
#include <utility>

#include "lpo/errors.hpp"

namespace lpo {

namespace {

void check_ball_arguments(const EnergyFunction& E, const Eigen::MatrixXd& Q,
                          const BallSpec& ball) {
  if (ball.n < 1) throw validation_error("ball_average: ball dimension must be positive");
  if (!(ball.L > 0.0)) throw validation_error("ball_average: ball radius must be positive");
  if (Q.rows() != ball.n) {
    throw validation_error("ball_average: Q has " + std::to_string(Q.rows()) +
                           " rows, ball dimension is " + std::to_string(ball.n));
  }
  if (Q.cols() < 1 || Q.cols() > Q.rows()) {
    throw validation_error("ball_average: Q must be n x r with 1 <= r <= n");
  }
  if (!E.w.empty() && E.dim() != ball.n) {
    throw validation_error("ball_average: energy dimension " + std::to_string(E.dim()) +
                           " does not match ball dimension " + std::to_string(ball.n));
  }
  // Loose guard: the trace formulas extend smoothly to non-orthonormal Q, so
  // small perturbations (finite-difference probes) must stay evaluable.
  const int r = static_cast<int>(Q.cols());
  const double gram_err =
      (Q.transpose() * Q - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (gram_err > 1e-3) {
    throw validation_error("ball_average: Q is far from orthonormal (Gram deviation " +
                           std::to_string(gram_err) + ")");
  }
}

}  // namespace

EnergyFunction make_energy(std::map<int, CpVector> coefficients) {
  int dim = -1;
  for (const auto& [k, wk] : coefficients) {
    if (k < 2) {
      throw validation_error("make_energy: coefficient degree " + std::to_string(k) +
                             " is below 2");
    }
    cp_validate(wk);
    if (wk.order() != k) {
      throw validation_error("make_energy: coefficient for degree " + std::to_string(k) +
                             " has order " + std::to_string(wk.order()));
    }
    if (dim < 0) dim = wk.dim();
    if (wk.dim() != dim) {
      throw validation_error("make_energy: coefficient dimensions disagree (" +
                             std::to_string(wk.dim()) + " vs " + std::to_string(dim) + ")");
    }
  }
  if (dim == 0) throw validation_error("make_energy: coefficient dimension must be positive");
  EnergyFunction E;
  E.w = std::move(coefficients);
  return E;
}

double eval_energy(const EnergyFunction& E, const Eigen::VectorXd& x) {
  if (!E.w.empty() && x.size() != E.dim()) {
    throw validation_error("eval_energy: x has size " + std::to_string(x.size()) +
                           ", energy dimension is " + std::to_string(E.dim()));
  }
  double total = 0.0;
  for (const auto& [k, wk] : E.w) total += cp_eval(wk, x);
  return 0.5 * total;
}

Eigen::VectorXd energy_state_gradient(const EnergyFunction& E, const Eigen::VectorXd& x) {
  if (!E.w.empty() && x.size() != E.dim()) {
    throw validation_error("energy_state_gradient: x has size " + std::to_string(x.size()) +
                           ", energy dimension is " + std::to_string(E.dim()));
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (const auto& [k, wk] : E.w) {
    const int R = wk.rank();
    if (R == 0) continue;
    // dots(j, s) = <u^j_s, x>; prefix/suffix products give the product-rule
    // weight prod_{t != s} dots(j, t) for each slot in O(k R) total.
    Eigen::MatrixXd dots(R, k);
    for (int s = 0; s < k; ++s) dots.col(s) = wk.factors[s].transpose() * x;
    Eigen::MatrixXd prefix = Eigen::MatrixXd::Ones(R, k + 1);
    Eigen::MatrixXd suffix = Eigen::MatrixXd::Ones(R, k + 1);
    for (int s = 0; s < k; ++s) {
      prefix.col(s + 1) = prefix.col(s).cwiseProduct(dots.col(s));
    }
    for (int s = k - 1; s >= 0; --s) {
      suffix.col(s) = suffix.col(s + 1).cwiseProduct(dots.col(s));
    }
    for (int s = 0; s < k; ++s) {
      g.noalias() += wk.factors[s] * prefix.col(s).cwiseProduct(suffix.col(s + 1));
    }
  }
  return 0.5 * g;
}

InputNormalForm to_input_normal(const EnergyFunction& E, const Eigen::MatrixXd& R,
                                const std::vector<CpVector>& outputs) {
  const int n = static_cast<int>(R.rows());
  if (R.cols() != n) throw validation_error("to_input_normal: R must be square");
  if (!E.w.empty() && E.dim() != n) {
    throw validation_error("to_input_normal: R is " + std::to_string(n) + " x " +
                           std::to_string(n) + ", energy dimension is " +
                           std::to_string(E.dim()));
  }
  const Eigen::MatrixXd Rt = R.transpose();
  InputNormalForm result;
  result.energy.symmetrized = E.symmetrized;
  for (const auto& [k, wk] : E.w) result.energy.w.emplace(k, cp_apply_factorwise(wk, Rt));
  result.outputs.reserve(outputs.size());
  for (const CpVector& ck : outputs) {
    if (ck.dim() != 0 && ck.dim() != n) {
      throw validation_error("to_input_normal: output dimension " + std::to_string(ck.dim()) +
                             " does not match R");
    }
    result.outputs.push_back(cp_apply_factorwise(ck, Rt));
  }
  return result;
}

double moment_coefficient(int kappa, int n, double L) {
  if (kappa < 1) throw validation_error("moment_coefficient: kappa must be >= 1");
  if (n < 1) throw validation_error("moment_coefficient: n must be >= 1");
  if (!(L > 0.0)) throw validation_error("moment_coefficient: L must be positive");
  double c = 1.0;
  for (int j = 1; j <= kappa; ++j) {
    c *= L * L * static_cast<double>(2 * j - 1) / static_cast<double>(n + 2 * j);
  }
  return c;
}

double ball_average_objective(const EnergyFunction& E, const Eigen::MatrixXd& Q,
                              const BallSpec& ball) {
  check_ball_arguments(E, Q, ball);
  double total = 0.0;
  for (const auto& [k, wk] : E.w) {
    if (k % 2 != 0 || wk.rank() == 0) continue;  // odd degrees average to zero
    total += moment_coefficient(k / 2, ball.n, ball.L) * cp_sym_pair_trace(wk, Q);
  }
  return 0.5 * total;
}

Eigen::MatrixXd ball_average_gradient(const EnergyFunction& E, const Eigen::MatrixXd& Q,
                                      const BallSpec& ball) {
  check_ball_arguments(E, Q, ball);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Q.rows(), Q.cols());
  for (const auto& [k, wk] : E.w) {
    if (k % 2 != 0 || wk.rank() == 0) continue;
    G.noalias() +=
        moment_coefficient(k / 2, ball.n, ball.L) * cp_sym_pair_trace_gradient(wk, Q);
  }
  return 0.5 * G;
}

}  // namespace lpo
