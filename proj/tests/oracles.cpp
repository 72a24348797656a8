// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
  return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Eigen::MatrixXd kron_power(const Eigen::MatrixXd& A, int k) {
  Eigen::MatrixXd out = A;
  for (int i = 1; i < k; ++i) out = kron(out, A);
  return out;
}

Eigen::VectorXd dense_cp(const lpo::CpVector& w) {
  const int k = w.order();
  const int n = w.dim();
  Eigen::Index len = 1;
  for (int i = 0; i < k; ++i) len *= n;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(len);
  std::vector<int> idx(k, 0);
  for (Eigen::Index flat = 0; flat < len; ++flat) {
    Eigen::Index rem = flat;
    for (int i = k - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % n);
      rem /= n;
    }
    double sum = 0.0;
    for (int j = 0; j < w.rank(); ++j) {
      double prod = 1.0;
      for (int i = 0; i < k; ++i) prod *= w.factors[i](idx[i], j);
      sum += prod;
    }
    out(flat) = sum;
  }
  return out;
}

Eigen::VectorXd dense_permute(const Eigen::VectorXd& v, int n, int k,
                              const std::vector<int>& tau) {
  Eigen::VectorXd out(v.size());
  std::vector<int> idx(k, 0);
  for (Eigen::Index flat = 0; flat < v.size(); ++flat) {
    Eigen::Index rem = flat;
    for (int i = k - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % n);
      rem /= n;
    }
    // Result slot s holds source slot tau[s], so the source multi-index x
    // satisfies x[tau[s]] = idx[s].
    std::vector<int> x(k);
    for (int s = 0; s < k; ++s) x[tau[s]] = idx[s];
    Eigen::Index src = 0;
    for (int i = 0; i < k; ++i) src = src * n + x[i];
    out(flat) = v(src);
  }
  return out;
}

Eigen::MatrixXd kron_sum_operator(const Eigen::MatrixXd& A, int k) {
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  Eigen::Index len = 1;
  for (int i = 0; i < k; ++i) len *= n;
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(len, len);
  for (int slot = 0; slot < k; ++slot) {
    Eigen::MatrixXd term = (slot == 0) ? A : eye;
    for (int i = 1; i < k; ++i) term = kron(term, (i == slot) ? A : eye);
    op += term;
  }
  return op;
}

Eigen::MatrixXd dense_matricize(const Eigen::VectorXd& v, int n, int K) {
  Eigen::Index half = 1;
  for (int i = 0; i < K; ++i) half *= n;
  if (v.size() != half * half) throw std::invalid_argument("dense_matricize: size mismatch");
  Eigen::MatrixXd M(half, half);
  for (Eigen::Index b = 0; b < half; ++b)
    for (Eigen::Index a = 0; a < half; ++a) M(a, b) = v(b * half + a);
  return M;
}

double ball_moment(const std::vector<int>& alpha, double L) {
  const int n = static_cast<int>(alpha.size());
  int total = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("ball_moment: negative exponent");
    if (a % 2 == 1) return 0.0;
    total += a;
  }
  // Surface integral over the unit sphere via the gamma-function formula,
  // then the radial factor and the ball-volume normalization, in log space.
  double log_surface = std::log(2.0);
  double beta_sum = 0.0;
  for (int a : alpha) {
    const double b = 0.5 * (a + 1);
    log_surface += std::lgamma(b);
    beta_sum += b;
  }
  log_surface -= std::lgamma(beta_sum);
  const double log_integral = log_surface + (total + n) * std::log(L) - std::log(total + n);
  const double log_volume =
      0.5 * n * std::log(M_PI) + n * std::log(L) - std::lgamma(0.5 * n + 1.0);
  return std::exp(log_integral - log_volume);
}

double trapezoid(const Eigen::VectorXd& t, const Eigen::VectorXd& f) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < t.size(); ++i)
    sum += 0.5 * (t(i + 1) - t(i)) * (f(i) + f(i + 1));
  return sum;
}

Eigen::MatrixXd randn(int rows, int cols, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = dist(rng);
  return M;
}

Eigen::MatrixXd random_stable(int n, std::mt19937& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(n, n) + 0.3 / std::sqrt(n) * randn(n, n, rng);
    const auto eig = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
    if (eig.real().maxCoeff() < -0.1) return A;
  }
  throw std::runtime_error("random_stable: failed to sample a stable matrix");
}

Eigen::MatrixXd random_orthonormal(int n, int r, std::mt19937& rng) {
  const Eigen::MatrixXd M = randn(n, r, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (int j = 0; j < r; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

lpo::CpVector random_cp(int order, int dim, int rank, std::mt19937& rng) {
  lpo::CpVector w;
  for (int i = 0; i < order; ++i) w.factors.push_back(randn(dim, rank, rng));
  return w;
}

}  // namespace oracle
