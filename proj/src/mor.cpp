// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/mor.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lpo/energy.hpp"
#include "lpo/errors.hpp"
#include "lpo/lyapunov.hpp"

namespace lpo {

namespace {

void check_order(const LPOSystem& sys, int r, const char* op) {
  if (r < 1 || r > sys.n())
    throw validation_error(std::string(op) + ": reduced order " + std::to_string(r) +
                           " must lie in 1.." + std::to_string(sys.n()));
}

void require_no_outputs_above(const LPOSystem& sys, int degree, const char* op) {
  for (int k = degree + 1; k <= sys.d(); ++k)
    if (sys.outputs[k - 1].rank() > 0)
      throw validation_error(std::string(op) + ": output degree " + std::to_string(k) +
                             " is present but unsupported by this method");
}

// Restores W^T V = I exactly: the raw bases satisfy it only up to the
// conditioning of the factors they were built from.
void biorthogonalize(const Eigen::MatrixXd& V, Eigen::MatrixXd& W) {
  const Eigen::MatrixXd M = W.transpose() * V;  // r x r, close to I
  W = M.partialPivLu().solve(W.transpose()).transpose();
}

// PSD square-root factor L with L L^T = sym(S) via eigendecomposition.
// Tolerates numerically semidefinite Gramians (single-output observability
// Gramians routinely have noise-level trailing eigenvalues): the tail below
// n * eps * |lambda|_max is clamped to zero.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double floor =
      ev.cwiseAbs().maxCoeff() * ev.size() * std::numeric_limits<double>::epsilon();
  Eigen::VectorXd root = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > floor) root(i) = std::sqrt(ev(i));
  return eig.eigenvectors() * root.asDiagonal();
}

void append_stability_warning(ReducedModel& model) {
  const double abscissa = spectral_abscissa(model.reduced.A);
  if (abscissa >= 0.0)
    model.warnings.push_back("reduced system is not Hurwitz (spectral abscissa " +
                             std::to_string(abscissa) + ")");
}

// Triangular controllability factor tolerant of numerically semidefinite
// Gramians.  Narrow-input systems routinely produce P whose trailing
// eigenvalues sit at roundoff level, where the plain Cholesky rejects; the
// weakly reachable directions are then given noise-level weight through a
// diagonal shift so the reduction can proceed (with a warning) instead of
// aborting.
Eigen::MatrixXd controllability_factor(const LPOSystem& sys, ReducedModel& model) {
  try {
    return solve_lyapunov(sys.A, sys.B).R;
  } catch (const numerical_error&) {
    Eigen::MatrixXd P = solve_lyapunov_dual(sys.A.transpose(), sys.B);
    const double shift = 4.0 * P.rows() * std::numeric_limits<double>::epsilon() *
                         P.diagonal().maxCoeff();
    P.diagonal().array() += shift;
    model.warnings.push_back(
        "controllability Gramian is numerically rank-deficient; "
        "its factor was regularized with a diagonal shift");
    return cholesky_spd(P);
  }
}

// Shared square-root truncation step: S = L_o^T R_c, V = R_c Z_r S_r^{-1/2},
// W = L_o U_r S_r^{-1/2}.
void square_root_truncate(const Eigen::MatrixXd& Rc, const Eigen::MatrixXd& Lo, int r,
                          const char* op, ReducedModel& model) {
  const Eigen::MatrixXd S = Lo.transpose() * Rc;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  model.hsv = svd.singularValues();
  const int n = static_cast<int>(S.rows());
  const double floor =
      model.hsv(0) * n * std::numeric_limits<double>::epsilon();
  if (model.hsv(r - 1) <= floor)
    throw numerical_error(std::string(op) + ": requested order " + std::to_string(r) +
                          " exceeds the numerical Hankel rank");
  if (r < n && (model.hsv(r - 1) - model.hsv(r)) <= 1e-12 * model.hsv(0))
    model.warnings.push_back(
        "retained and truncated Hankel singular values are not separated; "
        "the reduced subspace is not unique");

  const Eigen::VectorXd scale = model.hsv.head(r).cwiseSqrt().cwiseInverse();
  model.V = Rc * svd.matrixV().leftCols(r) * scale.asDiagonal();
  model.W = Lo * svd.matrixU().leftCols(r) * scale.asDiagonal();
  biorthogonalize(model.V, model.W);
}

}  // namespace

LPOSystem make_lpo_system(Eigen::MatrixXd A, Eigen::MatrixXd B,
                          std::vector<CpVector> outputs) {
  const int n = static_cast<int>(A.rows());
  if (n < 1 || A.cols() != n) throw validation_error("lpo_system: A must be square");
  if (B.rows() != n || B.cols() < 1)
    throw validation_error("lpo_system: B must be n x m with m >= 1");
  if (outputs.empty()) throw validation_error("lpo_system: at least one output degree");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    cp_validate(outputs[i]);
    if (outputs[i].order() != static_cast<int>(i) + 1)
      throw validation_error("lpo_system: outputs[" + std::to_string(i) +
                             "] must have order " + std::to_string(i + 1));
    if (outputs[i].dim() != n)
      throw validation_error("lpo_system: outputs[" + std::to_string(i) +
                             "] dimension mismatch");
  }
  return LPOSystem{std::move(A), std::move(B), std::move(outputs)};
}

Eigen::VectorXd linear_output_vector(const LPOSystem& sys) {
  if (sys.d() < 1 || sys.outputs[0].rank() == 0)
    return Eigen::VectorXd::Zero(sys.n());
  return sys.outputs[0].factors[0].rowwise().sum();
}

Eigen::RowVectorXcd transfer_function(const LPOSystem& sys, double omega) {
  const int n = sys.n();
  const Eigen::MatrixXcd resolvent =
      std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) -
      sys.A.cast<std::complex<double>>();
  const Eigen::MatrixXcd X =
      resolvent.partialPivLu().solve(sys.B.cast<std::complex<double>>());
  return linear_output_vector(sys).cast<std::complex<double>>().transpose() * X;
}

LPOSystem project_lpo(const LPOSystem& sys, const Eigen::MatrixXd& V,
                      const Eigen::MatrixXd& W) {
  const int n = sys.n();
  const int r = static_cast<int>(V.cols());
  if (V.rows() != n || W.rows() != n || W.cols() != r)
    throw validation_error("project_lpo: V and W must both be n x r");
  const double dev =
      (W.transpose() * V - Eigen::MatrixXd::Identity(r, r)).norm();
  if (dev > 1e-8)
    throw validation_error("project_lpo: bases are not biorthogonal (deviation " +
                           std::to_string(dev) + ")");
  std::vector<CpVector> reduced_outputs;
  reduced_outputs.reserve(sys.outputs.size());
  const Eigen::MatrixXd Vt = V.transpose();
  for (const CpVector& ck : sys.outputs) reduced_outputs.push_back(cp_apply_factorwise(ck, Vt));
  return make_lpo_system(W.transpose() * sys.A * V, W.transpose() * sys.B,
                         std::move(reduced_outputs));
}

ReducedModel balanced_truncation(const LPOSystem& sys, int r) {
  check_order(sys, r, "balanced_truncation");
  require_no_outputs_above(sys, 1, "balanced_truncation");
  const Eigen::VectorXd c1 = linear_output_vector(sys);
  if (c1.norm() == 0.0)
    throw validation_error("balanced_truncation: linear output is zero");

  ReducedModel model;
  model.method = ReductionMethod::kBalancedTruncation;
  model.r = r;
  const Eigen::MatrixXd Rc = controllability_factor(sys, model);
  const Eigen::MatrixXd Lo = psd_factor(solve_lyapunov_dual(sys.A, c1));
  square_root_truncate(Rc, Lo, r, "balanced_truncation", model);
  model.reduced = project_lpo(sys, model.V, model.W);
  append_stability_warning(model);
  return model;
}

ReducedModel qobt_reduce(const LPOSystem& sys, int r) {
  check_order(sys, r, "qobt_reduce");
  require_no_outputs_above(sys, 2, "qobt_reduce");
  const Eigen::VectorXd c1 = linear_output_vector(sys);
  const int n = sys.n();

  ReducedModel model;
  model.method = ReductionMethod::kQuadraticOutputBT;
  model.r = r;
  const Eigen::MatrixXd Rc = controllability_factor(sys, model);

  // Observability factor of the combined output map [sym(mat(c2)) R_c, c1]:
  // the quadratic output is weighted through the controllability factor.
  Eigen::MatrixXd C2;
  if (sys.d() >= 2 && sys.outputs[1].rank() > 0) {
    const Eigen::MatrixXd M2 = cp_to_matrix(sys.outputs[1]);
    C2 = 0.5 * (M2 + M2.transpose());
  }
  const bool has_quadratic = C2.size() > 0;
  const bool has_linear = c1.norm() > 0.0;
  if (!has_quadratic && !has_linear)
    throw validation_error("qobt_reduce: both output degrees are zero");
  Eigen::MatrixXd F(n, (has_quadratic ? n : 0) + (has_linear ? 1 : 0));
  if (has_quadratic) F.leftCols(n) = C2 * Rc;
  if (has_linear) F.rightCols(1) = c1;

  const Eigen::MatrixXd Lo = psd_factor(solve_lyapunov_dual(sys.A, F));
  square_root_truncate(Rc, Lo, r, "qobt_reduce", model);
  model.reduced = project_lpo(sys, model.V, model.W);
  append_stability_warning(model);
  return model;
}

ReducedModel energy_based_reduce(const LPOSystem& sys, int r, double L,
                                 const EnergyReduceOptions& opts) {
  check_order(sys, r, "energy_based_reduce");
  if (!(L > 0.0)) throw validation_error("energy_based_reduce: L must be positive");
  const int n = sys.n();

  ReducedModel model;
  model.method = ReductionMethod::kEnergyBased;
  model.r = r;
  model.L = L;
  const Eigen::MatrixXd R = controllability_factor(sys, model);

  // Input-normal realization x = R xt: At = R^{-1} A R, ct_k = (R^T slots) c_k.
  const Eigen::MatrixXd At =
      R.triangularView<Eigen::Lower>().solve(sys.A * R);
  const Eigen::MatrixXd Rt = R.transpose();
  std::vector<CpVector> ct;
  ct.reserve(sys.outputs.size());
  for (const CpVector& ck : sys.outputs) ct.push_back(cp_apply_factorwise(ck, Rt));

  // Quadrature levels follow the original matrix's spectral box: the
  // spectrum is similarity-invariant and R's conditioning must not inflate
  // the level heuristic.
  const SpectralBox box = estimate_spectral_box(sys.A);
  CoefficientBuildOptions copts;
  copts.tol = opts.tol;
  copts.even_only = true;
  copts.kappa_x_override = box.kappa_x;
  ObservabilityCoefficients coeffs = build_observability_coefficients(At, ct, copts);

  // The quadratic coefficient has an exact factored solution; prefer it to
  // the quadrature one (ell = 0 in the record marks the exact solve).
  if (ct[0].rank() > 0) {
    const Eigen::MatrixXd W2t = solve_lyapunov_dual(At, ct[0].factors[0]);
    CpVector w2;
    w2.factors = {W2t, Eigen::MatrixXd::Identity(n, n)};
    coeffs.w.at(2) = std::move(w2);
    for (auto& info : coeffs.info) {
      if (info.k == 2) {
        info.ell = 0;
        info.capped = false;
        info.rank = n;
      }
    }
  }

  const EnergyFunction Et = make_energy(coeffs.w);
  model.coefficient_info = coeffs.info;

  // Initial frame: dominant eigenvectors of the exact quadratic coefficient.
  Eigen::MatrixXd Q0;
  if (ct[0].rank() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cp_to_matrix(Et.w.at(2)));
    Q0 = eig.eigenvectors().rightCols(r);
  } else {
    Q0 = Eigen::MatrixXd::Identity(n, n).leftCols(r);
    model.warnings.push_back(
        "linear output absent; starting the ascent from coordinate directions");
  }

  const BallSpec ball{n, L};
  const auto objective = [&](const Eigen::MatrixXd& Q) {
    return ball_average_objective(Et, Q, ball);
  };
  const auto gradient = [&](const Eigen::MatrixXd& Q) {
    return ball_average_gradient(Et, Q, ball);
  };
  model.optimizer =
      maximize_on_stiefel(objective, gradient, make_stiefel_point(Q0), opts.optimizer);
  if (model.optimizer.stalled)
    model.warnings.push_back("ascent stalled before reaching the gradient tolerance");

  const Eigen::MatrixXd& Q = model.optimizer.point.Q;
  model.V = R * Q;
  model.W = Rt.triangularView<Eigen::Upper>().solve(Q);
  biorthogonalize(model.V, model.W);
  model.reduced = project_lpo(sys, model.V, model.W);
  append_stability_warning(model);
  return model;
}

}  // namespace lpo
