// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_ENERGY_HPP
#define LPO_ENERGY_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "lpo/cp_tensor.hpp"

namespace lpo {

/// Polynomial observability energy E(x) = 1/2 sum_k w_k^T x^(x k) with
/// coefficients for degrees k = 2..2d (odd degrees may be absent).  The
/// coefficients need not be stored in symmetric form: every consumer that
/// requires the symmetric part evaluates it implicitly, so `symmetrized`
/// only records whether an explicit symmetrization was performed.
struct EnergyFunction {
  std::map<int, CpVector> w;
  bool symmetrized = false;

  int dim() const { return w.empty() ? 0 : w.begin()->second.dim(); }
  int degree() const { return w.empty() ? 0 : w.rbegin()->first; }
};

/// Ball B_n(L) = { x in R^n : ||x||_2 <= L }.
struct BallSpec {
  int n = 0;
  double L = 1.0;
};

/// Validates and wraps a coefficient map (each key k maps to an order-k
/// vector, all of one dimension, keys >= 2).
EnergyFunction make_energy(std::map<int, CpVector> coefficients);

/// E(x) = 1/2 sum_k w_k^T x^(x k).
double eval_energy(const EnergyFunction& E, const Eigen::VectorXd& x);

/// dE/dx, accumulated by the product rule over every Kronecker slot; equal
/// to the symmetrized mode-1 contraction without forming the symmetrization.
Eigen::VectorXd energy_state_gradient(const EnergyFunction& E, const Eigen::VectorXd& x);

/// Energy and outputs of the input-normal realization x = R xt: every
/// coefficient slot is mapped by R^T, making the transformed controllability
/// Gramian the identity.
struct InputNormalForm {
  EnergyFunction energy;
  std::vector<CpVector> outputs;
};
InputNormalForm to_input_normal(const EnergyFunction& E, const Eigen::MatrixXd& R,
                                const std::vector<CpVector>& outputs);

/// c_kappa(n, L) = L^(2 kappa) (2 kappa - 1)!! n!! / (n + 2 kappa)!!,
/// evaluated as the telescoped product prod_{j=1..kappa} L^2 (2j-1)/(n+2j)
/// so no double factorial is ever formed.
double moment_coefficient(int kappa, int n, double L);

/// Ball average of the projected energy,
///   F(Q) = (1/V) integral_{B_n(L)} E(Q Q^T x) dx
///        = 1/2 sum_kappa c_kappa(n, L) * sym-pair-trace(w_{2 kappa}, Q);
/// odd-degree coefficients integrate to zero and are skipped.  Q must be
/// close to orthonormal (Gram deviation <= 1e-3); the formula itself is the
/// smooth extension in Q, which keeps finite differencing valid.
double ball_average_objective(const EnergyFunction& E, const Eigen::MatrixXd& Q,
                              const BallSpec& ball);

/// Euclidean gradient of ball_average_objective with respect to Q.
Eigen::MatrixXd ball_average_gradient(const EnergyFunction& E, const Eigen::MatrixXd& Q,
                                      const BallSpec& ball);

}  // namespace lpo

#endif  // LPO_ENERGY_HPP
