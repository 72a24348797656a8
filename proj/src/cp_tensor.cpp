// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#include "lpo/cp_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include "lpo/errors.hpp"

namespace lpo {

namespace {

// Exact byte image of a set of columns, used as a dedup key.
std::string column_key(const std::vector<Eigen::VectorXd>& cols) {
  std::string key;
  if (cols.empty()) return key;
  const std::size_t n = static_cast<std::size_t>(cols[0].size());
  key.resize(cols.size() * n * sizeof(double));
  char* out = key.data();
  for (const auto& c : cols) {
    std::memcpy(out, c.data(), n * sizeof(double));
    out += n * sizeof(double);
  }
  return key;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double double_factorial_odd(int K) {
  // (2K-1)!! = 1*3*...*(2K-1)
  double f = 1.0;
  for (int j = 1; j <= K; ++j) f *= 2 * j - 1;
  return f;
}

void check_even_order(const CpVector& w, const char* op) {
  if (w.order() < 2 || w.order() % 2 != 0)
    throw validation_error(std::string(op) + ": order must be even and >= 2, got " +
                           std::to_string(w.order()));
}

void check_projection_frame(const CpVector& w, const Eigen::MatrixXd& Q, const char* op) {
  if (Q.rows() != w.dim())
    throw validation_error(std::string(op) + ": Q has " + std::to_string(Q.rows()) +
                           " rows, expected " + std::to_string(w.dim()));
  if (Q.cols() < 1 || Q.cols() > Q.rows())
    throw validation_error(std::string(op) + ": Q must be a tall n x r frame");
}

void check_orthonormal(const Eigen::MatrixXd& Q, const char* op) {
  const Eigen::MatrixXd gram = Q.transpose() * Q;
  const double dev = (gram - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).norm();
  if (dev > 1e-8)
    throw validation_error(std::string(op) + ": columns of Q are not orthonormal (Gram deviation " +
                           std::to_string(dev) + ")");
}

// Slot-projected factors P[i] = Q^T * factors[i], shared by the trace kernels.
std::vector<Eigen::MatrixXd> project_factors(const CpVector& w, const Eigen::MatrixXd& Q) {
  std::vector<Eigen::MatrixXd> P(w.order());
  for (int i = 0; i < w.order(); ++i) P[i] = Q.transpose() * w.factors[i];
  return P;
}

}  // namespace

Permutation::Permutation(std::vector<int> slots) : slots_(std::move(slots)) {
  const int k = static_cast<int>(slots_.size());
  if (k == 0) throw validation_error("Permutation: empty slot list");
  std::vector<bool> seen(k, false);
  for (int s : slots_) {
    if (s < 0 || s >= k || seen[s]) throw validation_error("Permutation: not a bijection on 0..k-1");
    seen[s] = true;
  }
}

Permutation Permutation::identity(int order) {
  std::vector<int> slots(order);
  std::iota(slots.begin(), slots.end(), 0);
  return Permutation(slots);
}

void cp_validate(const CpVector& w) {
  if (w.order() < 1) throw validation_error("CpVector: order must be >= 1");
  const auto rows = w.factors[0].rows();
  const auto cols = w.factors[0].cols();
  if (rows < 1) throw validation_error("CpVector: dimension must be >= 1");
  for (const auto& f : w.factors)
    if (f.rows() != rows || f.cols() != cols)
      throw validation_error("CpVector: factor matrices must share one shape");
}

CpVector cp_zero(int order, int dim) {
  if (order < 1 || dim < 1) throw validation_error("cp_zero: order and dim must be >= 1");
  CpVector w;
  w.factors.assign(order, Eigen::MatrixXd(dim, 0));
  return w;
}

CpVector cp_rank_one(const std::vector<Eigen::VectorXd>& slots) {
  if (slots.empty()) throw validation_error("cp_rank_one: empty slot list");
  CpVector w;
  for (const auto& s : slots) {
    if (s.size() != slots[0].size()) throw validation_error("cp_rank_one: slot dimensions differ");
    w.factors.emplace_back(s);
  }
  cp_validate(w);
  return w;
}

double cp_eval(const CpVector& w, const Eigen::VectorXd& x) {
  cp_validate(w);
  if (x.size() != w.dim()) throw validation_error("cp_eval: x dimension mismatch");
  if (w.rank() == 0) return 0.0;
  Eigen::VectorXd prod = w.factors[0].transpose() * x;
  for (int i = 1; i < w.order(); ++i)
    prod.array() *= (w.factors[i].transpose() * x).array();
  return prod.sum();
}

CpVector cp_permute(const CpVector& w, const Permutation& tau) {
  cp_validate(w);
  if (tau.order() != w.order()) throw validation_error("cp_permute: permutation order mismatch");
  CpVector out;
  out.factors.reserve(w.order());
  for (int i = 0; i < w.order(); ++i) out.factors.push_back(w.factors[tau.slots()[i]]);
  return out;
}

CpVector cp_symmetrize(const CpVector& w) {
  cp_validate(w);
  const int k = w.order();
  const int n = w.dim();
  const int R = w.rank();
  if (k == 1 || R == 0) return w;

  // Arrangement count per term is k!/prod(multiplicities!); bound the total.
  const double kfact = factorial(k);

  struct OutTerm {
    std::vector<Eigen::VectorXd> cols;
    double weight = 0.0;
  };
  std::vector<OutTerm> out_terms;
  std::unordered_map<std::string, std::size_t> index;

  double total_arrangements = 0.0;
  for (int j = 0; j < R; ++j) {
    std::vector<Eigen::VectorXd> cols(k);
    for (int i = 0; i < k; ++i) cols[i] = w.factors[i].col(j);

    // Canonical ids: equal columns (bitwise) share an id.
    std::vector<int> ids(k, -1);
    std::vector<int> reps;
    for (int i = 0; i < k; ++i) {
      for (std::size_t u = 0; u < reps.size(); ++u) {
        if (cols[i] == cols[reps[u]]) {
          ids[i] = static_cast<int>(u);
          break;
        }
      }
      if (ids[i] < 0) {
        ids[i] = static_cast<int>(reps.size());
        reps.push_back(i);
      }
    }

    std::vector<int> mult(reps.size(), 0);
    for (int id : ids) ++mult[id];
    double mult_fact = 1.0;
    for (int m : mult) mult_fact *= factorial(m);
    const double weight = mult_fact / kfact;

    std::sort(ids.begin(), ids.end());
    total_arrangements += kfact / mult_fact;
    if (total_arrangements > 5e6)
      throw numerical_error("cp_symmetrize: symmetrization would exceed 5e6 terms");

    std::vector<Eigen::VectorXd> arrangement(k);
    do {
      for (int i = 0; i < k; ++i) arrangement[i] = cols[reps[ids[i]]];
      const std::string key = column_key(arrangement);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, out_terms.size());
        out_terms.push_back({arrangement, weight});
      } else {
        out_terms[it->second].weight += weight;
      }
    } while (std::next_permutation(ids.begin(), ids.end()));
  }

  CpVector out;
  out.factors.assign(k, Eigen::MatrixXd(n, static_cast<int>(out_terms.size())));
  for (std::size_t t = 0; t < out_terms.size(); ++t) {
    out.factors[0].col(static_cast<int>(t)) = out_terms[t].weight * out_terms[t].cols[0];
    for (int i = 1; i < k; ++i) out.factors[i].col(static_cast<int>(t)) = out_terms[t].cols[i];
  }
  return out;
}

CpVector cp_apply_factorwise(const CpVector& w, const Eigen::MatrixXd& M) {
  return cp_apply_factorwise(w, std::vector<Eigen::MatrixXd>(w.order(), M));
}

CpVector cp_apply_factorwise(const CpVector& w, const std::vector<Eigen::MatrixXd>& Ms) {
  cp_validate(w);
  if (static_cast<int>(Ms.size()) != w.order())
    throw validation_error("cp_apply_factorwise: need one matrix per slot");
  for (const auto& M : Ms) {
    if (M.cols() != w.dim()) throw validation_error("cp_apply_factorwise: matrix column mismatch");
    if (M.rows() != Ms[0].rows())
      throw validation_error("cp_apply_factorwise: slot matrices must share row count");
  }
  CpVector out;
  out.factors.reserve(w.order());
  for (int i = 0; i < w.order(); ++i) out.factors.emplace_back(Ms[i] * w.factors[i]);
  return out;
}

CpVector cp_kron(const CpVector& a, const CpVector& b) {
  cp_validate(a);
  cp_validate(b);
  if (a.dim() != b.dim()) throw validation_error("cp_kron: dimension mismatch");
  const int Ra = a.rank();
  const int Rb = b.rank();
  const int R = Ra * Rb;
  CpVector out;
  out.factors.assign(a.order() + b.order(), Eigen::MatrixXd(a.dim(), R));
  for (int i = 0; i < Ra; ++i)
    for (int j = 0; j < Rb; ++j) {
      const int t = i * Rb + j;
      for (int s = 0; s < a.order(); ++s) out.factors[s].col(t) = a.factors[s].col(i);
      for (int s = 0; s < b.order(); ++s) out.factors[a.order() + s].col(t) = b.factors[s].col(j);
    }
  return out;
}

CpVector cp_add(const CpVector& a, const CpVector& b) {
  cp_validate(a);
  cp_validate(b);
  if (a.order() != b.order() || a.dim() != b.dim())
    throw validation_error("cp_add: order or dimension mismatch");
  CpVector out;
  out.factors.reserve(a.order());
  for (int i = 0; i < a.order(); ++i) {
    Eigen::MatrixXd f(a.dim(), a.rank() + b.rank());
    f << a.factors[i], b.factors[i];
    out.factors.push_back(std::move(f));
  }
  return out;
}

CpVector cp_scale(const CpVector& w, double s) {
  cp_validate(w);
  CpVector out = w;
  if (out.rank() > 0) out.factors[0] *= s;
  return out;
}

CpVector cp_compress(const CpVector& w, double tol) {
  cp_validate(w);
  const int k = w.order();
  const int n = w.dim();
  const int R = w.rank();
  if (R == 0) return w;

  // Normalized columns and per-term scale; zero terms dropped outright.
  std::vector<int> live;
  std::vector<double> scale;
  std::vector<std::vector<Eigen::VectorXd>> unit(R, std::vector<Eigen::VectorXd>(k));
  for (int j = 0; j < R; ++j) {
    double s = 1.0;
    bool zero = false;
    for (int i = 0; i < k; ++i) {
      const double nrm = w.factors[i].col(j).norm();
      if (nrm == 0.0) {
        zero = true;
        break;
      }
      s *= nrm;
      unit[j][i] = w.factors[i].col(j) / nrm;
    }
    if (zero) continue;
    live.push_back(j);
    scale.push_back(s);
  }

  std::vector<std::vector<Eigen::VectorXd>> reps;
  std::vector<double> coef;
  std::vector<double> coef_abs;
  const bool pairwise = static_cast<int>(live.size()) <= 4096;
  for (std::size_t idx = 0; idx < live.size(); ++idx) {
    const int j = live[idx];
    int found = -1;
    double sign = 1.0;
    if (pairwise) {
      for (std::size_t p = 0; p < reps.size() && found < 0; ++p) {
        double sgn = 1.0;
        bool match = true;
        for (int i = 0; i < k; ++i) {
          const double dot = reps[p][i].dot(unit[j][i]);
          if (std::abs(dot) < 1.0 - tol) {
            match = false;
            break;
          }
          sgn *= (dot >= 0.0 ? 1.0 : -1.0);
        }
        if (match) {
          found = static_cast<int>(p);
          sign = sgn;
        }
      }
    }
    if (found < 0) {
      reps.push_back(unit[j]);
      coef.push_back(scale[idx]);
      coef_abs.push_back(std::abs(scale[idx]));
    } else {
      coef[found] += sign * scale[idx];
      coef_abs[found] += std::abs(scale[idx]);
    }
  }

  std::vector<int> keep;
  for (std::size_t p = 0; p < reps.size(); ++p)
    if (std::abs(coef[p]) > 1e-14 * coef_abs[p]) keep.push_back(static_cast<int>(p));

  CpVector out;
  out.factors.assign(k, Eigen::MatrixXd(n, static_cast<int>(keep.size())));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    const int p = keep[t];
    out.factors[0].col(static_cast<int>(t)) = coef[p] * reps[p][0];
    for (int i = 1; i < k; ++i) out.factors[i].col(static_cast<int>(t)) = reps[p][i];
  }
  return out;
}

double cp_pair_trace(const CpVector& w, const Eigen::MatrixXd& Q) {
  cp_validate(w);
  check_even_order(w, "cp_pair_trace");
  check_projection_frame(w, Q, "cp_pair_trace");
  check_orthonormal(Q, "cp_pair_trace");
  if (w.rank() == 0) return 0.0;
  const int K = w.order() / 2;
  const auto P = project_factors(w, Q);
  double total = 0.0;
  for (int j = 0; j < w.rank(); ++j) {
    double prod = 1.0;
    for (int m = 0; m < K; ++m) prod *= P[K + m].col(j).dot(P[m].col(j));
    total += prod;
  }
  return total;
}

const std::vector<std::vector<std::pair<int, int>>>& perfect_matchings(int K) {
  static std::map<int, std::vector<std::vector<std::pair<int, int>>>> cache;
  auto it = cache.find(K);
  if (it != cache.end()) return it->second;
  if (K < 1 || K > 8) throw validation_error("perfect_matchings: K must be in 1..8");

  std::vector<std::vector<std::pair<int, int>>> all;
  std::vector<std::pair<int, int>> current;
  std::vector<bool> used(2 * K, false);
  // Pair the smallest unused index with every larger unused index.
  std::function<void()> rec = [&]() {
    int first = -1;
    for (int i = 0; i < 2 * K; ++i)
      if (!used[i]) {
        first = i;
        break;
      }
    if (first < 0) {
      all.push_back(current);
      return;
    }
    used[first] = true;
    for (int j = first + 1; j < 2 * K; ++j) {
      if (used[j]) continue;
      used[j] = true;
      current.emplace_back(first, j);
      rec();
      current.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec();
  return cache.emplace(K, std::move(all)).first->second;
}

double cp_sym_pair_trace(const CpVector& w, const Eigen::MatrixXd& Q) {
  cp_validate(w);
  check_even_order(w, "cp_sym_pair_trace");
  check_projection_frame(w, Q, "cp_sym_pair_trace");
  if (w.rank() == 0) return 0.0;
  const int K = w.order() / 2;
  const auto& matchings = perfect_matchings(K);
  const double norm = double_factorial_odd(K);
  const auto P = project_factors(w, Q);

  double total = 0.0;
  Eigen::MatrixXd G(2 * K, 2 * K);
  for (int j = 0; j < w.rank(); ++j) {
    for (int s = 0; s < 2 * K; ++s)
      for (int t = s; t < 2 * K; ++t) {
        G(s, t) = P[s].col(j).dot(P[t].col(j));
        G(t, s) = G(s, t);
      }
    double term = 0.0;
    for (const auto& m : matchings) {
      double prod = 1.0;
      for (const auto& [s, t] : m) prod *= G(s, t);
      term += prod;
    }
    total += term / norm;
  }
  return total;
}

Eigen::MatrixXd cp_sym_pair_trace_gradient(const CpVector& w, const Eigen::MatrixXd& Q) {
  cp_validate(w);
  check_even_order(w, "cp_sym_pair_trace_gradient");
  check_projection_frame(w, Q, "cp_sym_pair_trace_gradient");
  const int K = w.order() / 2;
  const int k = 2 * K;
  const auto& matchings = perfect_matchings(K);
  const double norm = double_factorial_odd(K);
  const auto P = project_factors(w, Q);

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(Q.rows(), Q.cols());
  Eigen::MatrixXd G(k, k), C(k, k);
  Eigen::MatrixXd U(Q.rows(), k), V(k, static_cast<int>(Q.cols()));
  std::vector<double> prefix(K + 1), suffix(K + 1);
  for (int j = 0; j < w.rank(); ++j) {
    for (int s = 0; s < k; ++s) {
      U.col(s) = w.factors[s].col(j);
      V.row(s) = P[s].col(j).transpose();
    }
    for (int s = 0; s < k; ++s)
      for (int t = s; t < k; ++t) {
        G(s, t) = V.row(s).dot(V.row(t));
        G(t, s) = G(s, t);
      }
    // C(s,t) = sum over matchings containing (s,t) of the product of the
    // remaining pair values; leave-one-out products avoid division.
    C.setZero();
    for (const auto& m : matchings) {
      prefix[0] = 1.0;
      for (int p = 0; p < K; ++p) prefix[p + 1] = prefix[p] * G(m[p].first, m[p].second);
      suffix[K] = 1.0;
      for (int p = K - 1; p >= 0; --p) suffix[p] = suffix[p + 1] * G(m[p].first, m[p].second);
      for (int p = 0; p < K; ++p) {
        const double loo = prefix[p] * suffix[p + 1];
        C(m[p].first, m[p].second) += loo;
        C(m[p].second, m[p].first) += loo;
      }
    }
    grad.noalias() += U * (C * V) / norm;
  }
  return grad;
}

Eigen::VectorXd cp_densify(const CpVector& w) {
  cp_validate(w);
  const double full = std::pow(static_cast<double>(w.dim()), w.order());
  if (full > 1e8)
    throw validation_error("cp_densify: dense size " + std::to_string(full) + " exceeds 1e8 guard");
  const auto len = static_cast<Eigen::Index>(full);
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(len);
  for (int j = 0; j < w.rank(); ++j) {
    Eigen::VectorXd acc = w.factors[0].col(j);
    for (int i = 1; i < w.order(); ++i) {
      const Eigen::VectorXd& f = w.factors[i].col(j);
      Eigen::VectorXd next(acc.size() * f.size());
      for (Eigen::Index a = 0; a < acc.size(); ++a)
        next.segment(a * f.size(), f.size()) = acc(a) * f;
      acc = std::move(next);
    }
    dense += acc;
  }
  return dense;
}

Eigen::MatrixXd cp_to_matrix(const CpVector& w) {
  cp_validate(w);
  if (w.order() != 2) throw validation_error("cp_to_matrix: order must be 2");
  return w.factors[0] * w.factors[1].transpose();
}

}  // namespace lpo
