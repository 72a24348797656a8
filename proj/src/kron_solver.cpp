// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/kron_solver.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "lpo/errors.hpp"
#include "lpo/lyapunov.hpp"

namespace lpo {

namespace {

constexpr int kEllCap = 200;
constexpr double kPi = 3.14159265358979323846;

// Power-iteration estimate of the 2-norm condition number of X.
double condition_estimate(const Eigen::MatrixXcd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = std::complex<double>(1.0 + 0.01 * i, 0.0);
  v.normalize();
  double sigma_max = 0.0;
  for (int it = 0; it < 60; ++it) {
    v = X.adjoint() * (X * v);
    const double nrm = v.norm();
    if (nrm == 0.0) return 1.0;
    sigma_max = std::sqrt(nrm);
    v /= nrm;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(X);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_adj(X.adjoint().eval());
  Eigen::VectorXcd w(n);
  for (int i = 0; i < n; ++i) w(i) = std::complex<double>(1.0 + 0.01 * i, 0.0);
  w.normalize();
  double inv_sigma_min = 1.0;
  for (int it = 0; it < 60; ++it) {
    w = lu.solve(lu_adj.solve(w));
    const double nrm = w.norm();
    if (!std::isfinite(nrm) || nrm == 0.0) return 1e300;
    inv_sigma_min = std::sqrt(nrm);
    w /= nrm;
  }
  return sigma_max * inv_sigma_min;
}

bool is_symmetric(const Eigen::MatrixXd& A) {
  return (A - A.transpose()).norm() <= 1e-12 * std::max(1.0, A.norm());
}

}  // namespace

SpectralBox estimate_spectral_box(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw validation_error("estimate_spectral_box: A must be square");
  SpectralBox box;
  if (is_symmetric(A)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd lam = eig.eigenvalues();
    if (lam.maxCoeff() >= 0.0)
      throw validation_error("estimate_spectral_box: matrix is not Hurwitz, eigenvalue " +
                             std::to_string(lam.maxCoeff()) + " has nonnegative real part");
    box.lambda_min = -lam.maxCoeff();
    box.lambda_max = -lam.minCoeff();
    box.mu = 0.0;
    box.kappa_x = 1.0;
    box.symmetric = true;
    return box;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> eig(A);
  const Eigen::VectorXcd lam = eig.eigenvalues();
  const double max_re = lam.real().maxCoeff();
  if (max_re >= 0.0) {
    int worst = 0;
    for (int i = 1; i < lam.size(); ++i)
      if (lam(i).real() > lam(worst).real()) worst = i;
    throw validation_error("estimate_spectral_box: matrix is not Hurwitz, eigenvalue " +
                           std::to_string(lam(worst).real()) + " + " +
                           std::to_string(lam(worst).imag()) + "i has nonnegative real part");
  }
  box.lambda_min = -max_re;
  box.lambda_max = -lam.real().minCoeff();
  box.mu = lam.imag().cwiseAbs().maxCoeff();
  box.kappa_x = std::max(1.0, condition_estimate(eig.eigenvectors()));
  box.symmetric = false;
  return box;
}

EllChoice choose_ell(const SpectralBox& box, int k, double tol) {
  if (k < 1) throw validation_error("choose_ell: order must be >= 1");
  if (tol <= 0.0) throw validation_error("choose_ell: tolerance must be positive");
  if (box.lambda_min <= 0.0) throw validation_error("choose_ell: spectral box requires lambda_min > 0");
  // Bound constant taken as 1; everything in logs to survive kappa_x^k.
  const double log_pref = k * std::log(box.kappa_x) + box.mu / (box.lambda_min * kPi) -
                          std::log(k * box.lambda_min);
  const double need = (log_pref - std::log(tol)) / kPi;  // sqrt(ell) must reach this
  EllChoice choice;
  if (need <= 1.0) {
    choice.ell = 1;
    return choice;
  }
  const double ell = std::ceil(need * need);
  if (ell > kEllCap) {
    choice.ell = kEllCap;
    choice.capped = true;
  } else {
    choice.ell = static_cast<int>(ell);
  }
  return choice;
}

QuadratureRule quadrature_rule(int ell, int k, double lambda_min) {
  if (ell < 1) throw validation_error("quadrature_rule: ell must be >= 1");
  if (k < 1) throw validation_error("quadrature_rule: order must be >= 1");
  if (lambda_min <= 0.0) throw validation_error("quadrature_rule: lambda_min must be positive");
  QuadratureRule rule;
  rule.ell = ell;
  rule.order = k;
  rule.lambda_min = lambda_min;
  const double h = kPi / std::sqrt(static_cast<double>(ell));
  const double scale = k * lambda_min;
  rule.nodes.resize(2 * ell + 1);
  rule.weights.resize(2 * ell + 1);
  for (int i = -ell; i <= ell; ++i) {
    // log(exp(ih) + sqrt(1 + exp(2ih))) = asinh(exp(ih)), evaluated stably.
    rule.nodes(i + ell) = std::asinh(std::exp(i * h)) / scale;
    rule.weights(i + ell) = h / (std::sqrt(1.0 + std::exp(-2.0 * i * h)) * scale);
  }
  return rule;
}

CpVector assemble_rhs(const std::vector<CpVector>& outputs, int k) {
  const int d = static_cast<int>(outputs.size());
  if (d < 1) throw validation_error("assemble_rhs: need at least one output coefficient");
  const int n = outputs[0].dim();
  for (int i = 0; i < d; ++i) {
    cp_validate(outputs[i]);
    if (outputs[i].order() != i + 1)
      throw validation_error("assemble_rhs: outputs[i] must have order i+1");
    if (outputs[i].dim() != n) throw validation_error("assemble_rhs: output dimensions differ");
  }
  if (k < 2 || k > 2 * d)
    throw validation_error("assemble_rhs: degree must lie in 2..2d");

  const int K = k / 2;
  CpVector rhs = cp_zero(k, n);
  auto present = [&](int i) { return i >= 1 && i <= d && outputs[i - 1].rank() > 0; };
  if (k % 2 == 0) {
    if (present(K)) rhs = cp_add(rhs, cp_kron(outputs[K - 1], outputs[K - 1]));
    for (int i = 1; i <= K - 1; ++i)
      if (present(i) && present(k - i))
        rhs = cp_add(rhs, cp_scale(cp_kron(outputs[i - 1], outputs[k - i - 1]), 2.0));
  } else {
    for (int i = 1; i <= K; ++i)
      if (present(i) && present(k - i))
        rhs = cp_add(rhs, cp_scale(cp_kron(outputs[i - 1], outputs[k - i - 1]), 2.0));
  }
  return rhs;
}

TransposedExponential::TransposedExponential(const Eigen::MatrixXd& A, double kappa_limit) {
  if (A.rows() != A.cols()) throw validation_error("TransposedExponential: A must be square");
  n_ = static_cast<int>(A.rows());
  Eigen::EigenSolver<Eigen::MatrixXd> eig(A);
  eigvals_ = eig.eigenvalues();
  if (eigvals_.real().maxCoeff() >= 0.0)
    throw validation_error("TransposedExponential: matrix is not Hurwitz, eigenvalue with real part " +
                           std::to_string(eigvals_.real().maxCoeff()) + " found");
  const Eigen::MatrixXcd X = eig.eigenvectors();
  const double kappa = condition_estimate(X);
  if (kappa <= kappa_limit) {
    use_schur_ = false;
    xt_ = X.transpose();
    xt_lu_.compute(xt_);
  } else {
    // Ill-conditioned eigenbasis (possibly defective A): one real Schur form
    // of A^T, dense exponentials of the quasi-triangular factor per node.
    use_schur_ = true;
    Eigen::RealSchur<Eigen::MatrixXd> schur(A.transpose().eval());
    z_ = schur.matrixU();
    s_ = schur.matrixT();
  }
}

Eigen::MatrixXcd TransposedExponential::prepare(const Eigen::MatrixXd& V) const {
  if (V.rows() != n_) throw validation_error("TransposedExponential: row mismatch");
  if (use_schur_) return (z_.transpose() * V).cast<std::complex<double>>();
  return xt_ * V;
}

Eigen::MatrixXd TransposedExponential::apply_prepared(double a,
                                                      const Eigen::MatrixXcd& prepared) const {
  if (use_schur_) {
    const Eigen::MatrixXd expS = (a * s_).exp();
    return z_ * (expS * prepared.real());
  }
  const Eigen::VectorXcd phase = (a * eigvals_.array()).exp();
  return xt_lu_.solve(phase.asDiagonal() * prepared).real();
}

Eigen::MatrixXd TransposedExponential::apply(double a, const Eigen::MatrixXd& V) const {
  return apply_prepared(a, prepare(V));
}

CpVector solve_kron_lowrank(const TransposedExponential& expA, const CpVector& rhs,
                            const QuadratureRule& rule) {
  cp_validate(rhs);
  if (rule.order != rhs.order())
    throw validation_error("solve_kron_lowrank: rule order does not match rhs order");
  if (expA.dim() != rhs.dim())
    throw validation_error("solve_kron_lowrank: dimension mismatch");
  const int k = rhs.order();
  const int n = rhs.dim();
  const int R = rhs.rank();
  if (R == 0) return cp_zero(k, n);

  // Slots with identical factor matrices (common for paired right-hand
  // sides like c (x) c) share one transform and one application per node.
  std::vector<int> unique_of(k);
  std::vector<int> owners;
  for (int s = 0; s < k; ++s) {
    unique_of[s] = -1;
    for (size_t u = 0; u < owners.size(); ++u)
      if (rhs.factors[s] == rhs.factors[owners[u]]) {
        unique_of[s] = static_cast<int>(u);
        break;
      }
    if (unique_of[s] < 0) {
      unique_of[s] = static_cast<int>(owners.size());
      owners.push_back(s);
    }
  }
  std::vector<Eigen::MatrixXcd> prepared;
  prepared.reserve(owners.size());
  for (int s : owners) prepared.push_back(expA.prepare(rhs.factors[s]));

  const int nodes = static_cast<int>(rule.nodes.size());
  CpVector out;
  out.factors.assign(k, Eigen::MatrixXd(n, nodes * R));
  std::vector<Eigen::MatrixXd> applied(owners.size());
  for (int i = 0; i < nodes; ++i) {
    for (size_t u = 0; u < owners.size(); ++u)
      applied[u] = expA.apply_prepared(rule.nodes(i), prepared[u]);
    for (int s = 0; s < k; ++s) {
      if (s == 0) {
        out.factors[0].middleCols(i * R, R) = rule.weights(i) * applied[unique_of[0]];
      } else {
        out.factors[s].middleCols(i * R, R) = applied[unique_of[s]];
      }
    }
  }
  return out;
}

CpVector solve_kron_lowrank(const Eigen::MatrixXd& A, const CpVector& rhs,
                            const QuadratureRule& rule) {
  return solve_kron_lowrank(TransposedExponential(A), rhs, rule);
}

ObservabilityCoefficients build_observability_coefficients(
    const Eigen::MatrixXd& A, const std::vector<CpVector>& outputs,
    const CoefficientBuildOptions& opts) {
  const int d = static_cast<int>(outputs.size());
  if (d < 1) throw validation_error("build_observability_coefficients: no outputs");
  const int n = static_cast<int>(A.rows());
  for (const auto& c : outputs)
    if (c.dim() != n)
      throw validation_error("build_observability_coefficients: output dimension mismatch");
  if (opts.ell_override == 0 || opts.ell_override < -1 || opts.ell_override > kEllCap)
    throw validation_error("build_observability_coefficients: ell override must be in 1..200");

  SpectralBox box = estimate_spectral_box(A);
  if (opts.kappa_x_override > 0.0) box.kappa_x = opts.kappa_x_override;
  const TransposedExponential expA(A);

  ObservabilityCoefficients result;
  for (int k = 2; k <= 2 * d; ++k) {
    if (opts.even_only && k % 2 != 0) continue;
    CpVector rhs = assemble_rhs(outputs, k);
    if (opts.compress) rhs = cp_compress(rhs);

    CoefficientInfo info;
    info.k = k;
    info.rhs_rank = rhs.rank();
    if (rhs.rank() == 0) {
      result.w.emplace(k, cp_zero(k, n));
      info.ell = 0;
      info.rank = 0;
      result.info.push_back(info);
      continue;
    }

    EllChoice choice;
    if (opts.ell_override > 0) {
      choice.ell = opts.ell_override;
    } else {
      choice = choose_ell(box, k, opts.tol);
    }
    const QuadratureRule rule = quadrature_rule(choice.ell, k, box.lambda_min);
    CpVector w = solve_kron_lowrank(expA, rhs, rule);
    if (opts.compress) w = cp_compress(w);

    info.ell = choice.ell;
    info.capped = choice.capped;
    info.rank = w.rank();
    result.info.push_back(info);
    result.w.emplace(k, std::move(w));
  }
  return result;
}

}  // namespace lpo
