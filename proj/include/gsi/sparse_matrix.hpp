#pragma once

#include <vector>

#include "gsi/pattern.hpp"
#include "gsi/types.hpp"

namespace gsi {

/// Symmetric sparse matrix holding one value per lower-triangle pattern
/// entry; the upper triangle is implied (A_ji = A_ij).
class SymmetricSparseMatrix {
 public:
  explicit SymmetricSparseMatrix(SparsityPattern pattern);

  const SparsityPattern& pattern() const { return pattern_; }
  Index n() const { return pattern_.n(); }

  /// i >= j and (i, j) must be in the pattern.
  void set(Index i, Index j, double value);

  /// Adds to the stored value; entry must exist.
  void add(Index i, Index j, double value);

  /// Value at (i, j), i >= j; zero if outside the pattern.
  double value_or_zero(Index i, Index j) const;

  /// Symmetric access: swaps indices if i < j.
  double value_sym(Index i, Index j) const;

 private:
  size_t slot(Index i, Index j) const;  // index into vals_, asserts membership

  SparsityPattern pattern_;
  std::vector<std::vector<double>> vals_;  // parallel to pattern columns
};

}  // namespace gsi
