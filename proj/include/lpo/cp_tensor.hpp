// Copyright (c) 2026 lpo-mor contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef LPO_CP_TENSOR_HPP
#define LPO_CP_TENSOR_HPP

#include <vector>

#include <Eigen/Dense>

namespace lpo {

/// Vector in R^(n^k) stored in canonical polyadic (CP) form,
///   w = sum_j factors[0](:,j) (x) factors[1](:,j) (x) ... (x) factors[k-1](:,j),
/// where (x) is the Kronecker product with the first slot slowest.
/// All factor matrices share the same shape n x R.  R may be zero (the zero
/// vector).  The stored rank is an upper bound on the true Kronecker rank.
struct CpVector {
  std::vector<Eigen::MatrixXd> factors;

  int order() const { return static_cast<int>(factors.size()); }
  int dim() const { return factors.empty() ? 0 : static_cast<int>(factors[0].rows()); }
  int rank() const { return factors.empty() ? 0 : static_cast<int>(factors[0].cols()); }
};

/// Permutation of the k slots of an order-k CP vector.
class Permutation {
 public:
  explicit Permutation(std::vector<int> slots);
  static Permutation identity(int order);

  int order() const { return static_cast<int>(slots_.size()); }
  const std::vector<int>& slots() const { return slots_; }

 private:
  std::vector<int> slots_;
};

/// Throws validation_error unless all factor matrices share one shape.
void cp_validate(const CpVector& w);

/// Zero vector of the given order and dimension (rank 0).
CpVector cp_zero(int order, int dim);

/// Rank-1 CP vector with the given slot columns.
CpVector cp_rank_one(const std::vector<Eigen::VectorXd>& slots);

/// Evaluates w^T (x (x) x (x) ... (x) x) in O(n k R) without densifying.
double cp_eval(const CpVector& w, const Eigen::VectorXd& x);

/// Reorders slots: result slot i holds factor tau.slots()[i] of w.
CpVector cp_permute(const CpVector& w, const Permutation& tau);

/// Averages w over all slot permutations.  Arrangements that produce an
/// identical factor tuple (repeated slots) are merged with summed weights,
/// so the output rank is at most k!/prod(multiplicities!) per input term.
CpVector cp_symmetrize(const CpVector& w);

/// Applies M to every slot: result term j = (M u^j_1) (x) ... (x) (M u^j_k).
CpVector cp_apply_factorwise(const CpVector& w, const Eigen::MatrixXd& M);

/// Applies Ms[i] to slot i.  All Ms must share the same row count.
CpVector cp_apply_factorwise(const CpVector& w, const std::vector<Eigen::MatrixXd>& Ms);

/// Kronecker product: order adds, rank multiplies.
CpVector cp_kron(const CpVector& a, const CpVector& b);

/// Sum: ranks add (columns concatenated, no compression).
CpVector cp_add(const CpVector& a, const CpVector& b);

/// Scales by s, folded into the first slot.
CpVector cp_scale(const CpVector& w, double s);

/// Drops zero terms and merges terms whose slot columns are pairwise
/// parallel within tol (factor-wise Gram analysis).  The pairwise scan is
/// skipped above 4096 terms; only zero terms are dropped there.
CpVector cp_compress(const CpVector& w, double tol = 1e-12);

/// For even order 2K and orthonormal Q (n x r), computes
///   tr((Q (x) ... (x) Q)^T mat(w) (Q (x) ... (x) Q))
/// where mat(w) is the n^K x n^K matricization, evaluated term-wise as
///   sum_j prod_m (u^j_{K+m})^T Q Q^T u^j_m.
/// The result equals the subspace-averaged quadratic form only when the
/// densification of w is permutation-symmetric (caller responsibility).
double cp_pair_trace(const CpVector& w, const Eigen::MatrixXd& Q);

/// Pair trace of the symmetrized vector, tr((Q...)^T mat(Sym[w]) (Q...)),
/// evaluated without materializing Sym[w]: per term, the average over slot
/// permutations collapses to a sum over perfect matchings of the 2K slots,
///   (1/(2K-1)!!) sum_matchings prod_pairs (u_s^T Q Q^T u_t).
/// Unlike cp_pair_trace this does not require orthonormal Q: the formula is
/// the smooth extension in Q, so finite-difference probes stay evaluable.
double cp_sym_pair_trace(const CpVector& w, const Eigen::MatrixXd& Q);

/// Euclidean gradient of cp_sym_pair_trace with respect to Q (n x r),
/// treating Q as unconstrained.  Q is not required to be orthonormal here;
/// the trace extends smoothly to arbitrary Q.
Eigen::MatrixXd cp_sym_pair_trace_gradient(const CpVector& w, const Eigen::MatrixXd& Q);

/// Explicit dense expansion (length n^k).  Guarded: n^k must not exceed 1e8.
Eigen::VectorXd cp_densify(const CpVector& w);

/// Matricization of an order-2 CP vector: M(i,j) = dense[i*n + j],
/// i.e. M = factors[0] * factors[1]^T.
Eigen::MatrixXd cp_to_matrix(const CpVector& w);

/// All perfect matchings of {0, ..., 2K-1} as lists of K index pairs.
/// There are (2K-1)!! of them; results are cached per K.
const std::vector<std::vector<std::pair<int, int>>>& perfect_matchings(int K);

}  // namespace lpo

#endif  // LPO_CP_TENSOR_HPP
