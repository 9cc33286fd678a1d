#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gsi/types.hpp"

namespace gsi {

/// Sparsity pattern of the lower triangle of a symmetric N x N matrix.
/// Diagonal entries are always present. Entries are stored per column as
/// sorted row lists, diagonal first.
class SparsityPattern {
 public:
  explicit SparsityPattern(Index n);

  Index n() const { return n_; }

  /// Inserts (i, j), i >= j. Diagonals are already present; inserting an
  /// existing entry is a no-op.
  void insert(Index i, Index j);

  bool contains(Index i, Index j) const;

  /// Rows i >= j present in column j, ascending (starts with the diagonal).
  const std::vector<Index>& column(Index j) const { return cols_[static_cast<size_t>(j)]; }

  /// Columns j < i present in row i, ascending (strictly lower part only).
  std::vector<std::vector<Index>> row_lists() const;

  /// All entries in basic triangular order (row ascending, column ascending
  /// within a row), diagonal included.
  std::vector<IndexPair> entries() const;

  /// Number of lower-triangle entries, diagonal included.
  std::int64_t size() const;

  /// size() - n: strictly-lower entry count.
  std::int64_t off_diagonal_count() const { return size() - n_; }

  /// True if the pattern is a fixed point of the four-corners rule.
  bool is_closed() const;

  friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;

 private:
  Index n_;
  std::vector<std::vector<Index>> cols_;
};

/// Primary variable order: bijection between external variable labels and
/// positions 0..n-1.
class PrimaryOrder {
 public:
  /// Builds from position_of_label; must be a permutation of 0..n-1.
  explicit PrimaryOrder(std::vector<Index> position_of_label);

  static PrimaryOrder identity(Index n);

  Index n() const { return static_cast<Index>(pos_of_label_.size()); }
  Index position(Index label) const { return pos_of_label_[static_cast<size_t>(label)]; }
  Index label_at(Index position) const { return label_of_pos_[static_cast<size_t>(position)]; }

 private:
  std::vector<Index> pos_of_label_;
  std::vector<Index> label_of_pos_;
};

/// Factor graph topology: variable count plus the variable scope of each
/// factor. Values live elsewhere; this is adjacency only.
struct FactorGraphTopology {
  Index n_variables = 0;
  std::vector<std::vector<Index>> factors;

  /// Throws std::invalid_argument on an out-of-range label or empty scope.
  void validate() const;
};

/// Adjacency pattern of A under the given order: (i,i) for all i, plus
/// (i,j) whenever the variables at positions i and j share a factor.
SparsityPattern pattern_from_graph(const FactorGraphTopology& graph, const PrimaryOrder& order);

/// Smallest superset of `pattern` closed under the four-corners rule:
/// (i,j) and (k,j) present with i < k forces (k,i). Computed by fixed-point
/// iteration of the rule. The added entries are the fill-in.
SparsityPattern symbolic_fill_in(const SparsityPattern& pattern);

/// Orders variables by a depth-first search along a spanning tree of the
/// variable adjacency graph (children before parents), which yields zero
/// fill-in on trees. Components are processed in label order.
PrimaryOrder spanning_tree_order(const FactorGraphTopology& graph);

/// Uniformly random permutation, deterministic for a fixed seed.
PrimaryOrder random_order(Index n, std::uint64_t seed);

/// Serialization: header "N <n>" then sorted, 1-based "i j" lines.
void write_pattern(std::ostream& out, const SparsityPattern& pattern);
SparsityPattern read_pattern(std::istream& in);

}  // namespace gsi
