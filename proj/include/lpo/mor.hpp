// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_MOR_HPP
#define LPO_MOR_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpo/cp_tensor.hpp"
#include "lpo/kron_solver.hpp"
#include "lpo/stiefel_opt.hpp"

namespace lpo {

/// Linear state dynamics with polynomial output:
///   xdot = A x + B u,   y = sum_{k=1..d} c_k^T x^(x k),
/// where outputs[k-1] stores c_k as an order-k CP vector (rank 0 when the
/// degree is absent).
struct LPOSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<CpVector> outputs;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int d() const { return static_cast<int>(outputs.size()); }
};

LPOSystem make_lpo_system(Eigen::MatrixXd A, Eigen::MatrixXd B,
                          std::vector<CpVector> outputs);

/// Dense linear output coefficient c_1 (zero vector when absent).
Eigen::VectorXd linear_output_vector(const LPOSystem& sys);

/// H(i omega) = c_1^T (i omega I - A)^{-1} B, the transfer function of the
/// linear part (1 x m).
Eigen::RowVectorXcd transfer_function(const LPOSystem& sys, double omega);

enum class ReductionMethod {
  kBalancedTruncation,
  kQuadraticOutputBT,
  kEnergyBased,
};

struct ReducedModel {
  Eigen::MatrixXd V;  // n x r trial basis
  Eigen::MatrixXd W;  // n x r test basis, W^T V = I
  LPOSystem reduced;  // r-dimensional system
  ReductionMethod method = ReductionMethod::kBalancedTruncation;
  int r = 0;
  double L = 0.0;                     // ball radius (energy method only)
  Eigen::VectorXd hsv;                // Hankel-type singular values (BT/QOBT)
  OptimizeReport optimizer;           // ascent report (energy method only)
  std::vector<CoefficientInfo> coefficient_info;  // energy method only
  std::vector<std::string> warnings;
};

/// Petrov-Galerkin projection of the full system: A -> W^T A V, B -> W^T B,
/// c_k -> (V^T per slot) c_k (term ranks are preserved).  Requires
/// ||W^T V - I|| <= 1e-8.
LPOSystem project_lpo(const LPOSystem& sys, const Eigen::MatrixXd& V,
                      const Eigen::MatrixXd& W);

/// Square-root balanced truncation of the linear part.  The system must have
/// no higher-order outputs (d = 1, or every c_k with k >= 2 of rank zero).
/// Records all Hankel singular values and warns when the retained and
/// truncated ones are not cleanly separated.
ReducedModel balanced_truncation(const LPOSystem& sys, int r);

/// Balanced truncation for quadratic output (d <= 2): the observability side
/// uses the Gramian of the combined output map [sym(mat(c_2)) R_c, c_1],
/// which weights the quadratic output by the controllability factor R_c.
ReducedModel qobt_reduce(const LPOSystem& sys, int r);

struct EnergyReduceOptions {
  OptimizerConfig optimizer;
  double tol = 1e-6;  // quadrature accuracy for the energy coefficients
};

/// Energy-based reduction: transforms to the input-normal realization
/// x = R xt (P = R R^T the controllability Gramian), builds the even
/// observability coefficients there, maximizes the ball-averaged projected
/// energy over the Stiefel manifold (started from the dominant eigenvectors
/// of the exact quadratic coefficient), and projects with V = R Q,
/// W = R^{-T} Q.
ReducedModel energy_based_reduce(const LPOSystem& sys, int r, double L,
                                 const EnergyReduceOptions& opts = {});

}  // namespace lpo

#endif  // LPO_MOR_HPP
