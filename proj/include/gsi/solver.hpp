#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gsi/pattern.hpp"
#include "gsi/sparse_matrix.hpp"
#include "gsi/types.hpp"

namespace gsi {

/// Unit lower-triangular L and positive diagonal S with A = L S L^T.
/// L values are stored row-major on the closed pattern's strictly-lower
/// entries; the unit diagonal is implicit.
struct LdlFactors {
  SparsityPattern pattern;               // closed pattern (fill-in included)
  std::vector<std::vector<Index>> rows;  // per-row sorted columns j < i
  std::vector<std::vector<double>> l;    // parallel values L_ij
  std::vector<double> s;                 // S_ii > 0

  Index n() const { return pattern.n(); }

  /// L_ij for i > j; zero outside the pattern, 1 on the diagonal.
  double l_value(Index i, Index j) const;
};

/// Solution of the primary system, with the forward-substitution
/// intermediate w kept alongside x.
struct Solution {
  std::vector<double> x;
  std::vector<double> w;
};

/// Entries y_ij of A^-1 on the closed pattern (symmetric restriction).
struct SelectedInverse {
  SparsityPattern pattern;
  std::vector<std::vector<Index>> rows;  // same layout as LdlFactors
  std::vector<std::vector<double>> y;    // strictly-lower values
  std::vector<double> y_diag;            // y_ii

  /// y_ij for (i, j) in the pattern (i >= j after symmetric swap).
  double value(Index i, Index j) const;
};

/// Relative pivot threshold: a pivot S_jj <= 1e-12 * max_i A_ii fails.
inline constexpr double kPivotRelTol = 1e-12;

/// Factorizes A = L S L^T on the four-corners closure of A's pattern.
/// Fill-in entries of A are treated as zero. Columns are processed in
/// ascending order, rows ascending within each column. Throws
/// NotPositiveDefiniteError naming the failing index when a pivot drops
/// below the threshold.
LdlFactors ldl_factorize(const SymmetricSparseMatrix& a);

/// Forward substitution L S w = b, then backward substitution L^T x = w.
Solution solve_primary(const LdlFactors& factors, const std::vector<double>& b);

/// Takahashi recursion: computes A^-1 restricted to the closed pattern by
/// backward substitution over the pattern entries in reverse basic order
/// (rows descending, columns descending within a row). Only stored pattern
/// entries appear in the sums; closure guarantees every omitted term is
/// exactly zero.
SelectedInverse selected_inverse(const LdlFactors& factors);

/// Reference-only dense inverse (n <= 500). Throws std::invalid_argument
/// beyond the guard and std::runtime_error on a singular/non-PD matrix.
Eigen::MatrixXd dense_oracle_inverse(const SymmetricSparseMatrix& a);

/// Bundle of everything the global pipeline produces for one problem.
struct GlobalSolution {
  LdlFactors factors;
  Solution solution;
  SelectedInverse selinv;
};

/// Factorize, solve, and invert in one call.
GlobalSolution solve_global(const SymmetricSparseMatrix& a, const std::vector<double>& b);

}  // namespace gsi
