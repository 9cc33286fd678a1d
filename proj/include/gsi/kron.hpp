#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gsi/pattern.hpp"
#include "gsi/solver.hpp"
#include "gsi/types.hpp"

namespace gsi::kron {

/// Dense Kronecker/vectorization oracle. Everything in this namespace exists
/// to verify structural results at desk scale; nothing here is on the
/// production solve path.

/// Largest n the dense constructions accept (N^2 x N^2 products stay cheap).
inline constexpr Index kMaxOracleN = 12;

/// Ordering of the M = n(n+1)/2 lower-triangle index pairs.
class SecondaryOrder {
 public:
  SecondaryOrder(Index n, std::vector<IndexPair> sequence);

  Index n() const { return n_; }
  Index m() const { return static_cast<Index>(sequence_.size()); }
  const std::vector<IndexPair>& sequence() const { return sequence_; }
  const IndexPair& at(Index pos) const { return sequence_[static_cast<size_t>(pos)]; }

  /// Position of a pair in the sequence.
  Index position(IndexPair p) const;

 private:
  Index n_;
  std::vector<IndexPair> sequence_;
};

/// 11, 21, 22, 31, 32, 33, ..., NN: rows top to bottom, left to right.
SecondaryOrder basic_triangular_order(Index n);

/// Stable partition of the basic order with all pairs outside `l_pattern`
/// first, then all pairs inside it, both halves keeping basic relative
/// order. This is the fixed point of exhaustively swapping adjacent
/// (member, non-member) pairs. Requires a four-corners-closed pattern.
SecondaryOrder ultimate_triangular_order(Index n, const SparsityPattern& l_pattern);

/// Column-major vectorization.
Eigen::VectorXd vec(const Eigen::MatrixXd& a);

/// Explicit Kronecker product a (x) b.
Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Elimination matrix: M x N^2, row per pair (i,j) equal to vec(1_ji)^T.
/// Picks the upper-half entries of a vectorized matrix.
Eigen::MatrixXd elimination_matrix(const SecondaryOrder& order);

/// Duplication matrix: N^2 x M, column per pair (i,j) equal to
/// vec((1 - delta_ij) 1_ij + 1_ji). Reconstitutes a symmetric matrix.
Eigen::MatrixXd duplication_matrix(const SecondaryOrder& order);

/// Dense images of the factorization for oracle work.
Eigen::MatrixXd dense_l(const LdlFactors& factors);
Eigen::VectorXd dense_s(const LdlFactors& factors);
Eigen::MatrixXd dense_a(const SymmetricSparseMatrix& a);

/// Closed-form entries. Pairs are (row, col) with row >= col; L is the
/// unit-lower factor. Each must match the corresponding dense construction.
double entry_c(IndexPair rc, IndexPair kl, const LdlFactors& factors);
double entry_g(IndexPair rc, IndexPair kl, const LdlFactors& factors);
/// 1/S_jj on the diagonal pairs, zero elsewhere. Throws on S_jj <= 0.
double entry_d(IndexPair rc, const LdlFactors& factors);

/// Dense constructions E (1 (x) L^T) D, E (1 (x) L) D, E vec(S^-1),
/// E vec(A) under the given order. Verification only.
Eigen::MatrixXd build_c(const LdlFactors& factors, const SecondaryOrder& order);
Eigen::MatrixXd build_g(const LdlFactors& factors, const SecondaryOrder& order);
Eigen::VectorXd build_d(const LdlFactors& factors, const SecondaryOrder& order);
Eigen::VectorXd build_h(const SymmetricSparseMatrix& a, const SecondaryOrder& order);

}  // namespace gsi::kron
