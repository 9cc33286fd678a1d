#include "gsi/sparse_matrix.hpp"

#include <algorithm>

namespace gsi {

SymmetricSparseMatrix::SymmetricSparseMatrix(SparsityPattern pattern)
    : pattern_(std::move(pattern)) {
  vals_.resize(static_cast<size_t>(pattern_.n()));
  for (Index j = 0; j < pattern_.n(); ++j)
    vals_[static_cast<size_t>(j)].assign(pattern_.column(j).size(), 0.0);
}

size_t SymmetricSparseMatrix::slot(Index i, Index j) const {
  const auto& rows = pattern_.column(j);
  auto it = std::lower_bound(rows.begin(), rows.end(), i);
  if (it == rows.end() || *it != i)
    throw std::invalid_argument("entry " + to_string_1based({i, j}) + " not in pattern");
  return static_cast<size_t>(it - rows.begin());
}

void SymmetricSparseMatrix::set(Index i, Index j, double value) {
  vals_[static_cast<size_t>(j)][slot(i, j)] = value;
}

void SymmetricSparseMatrix::add(Index i, Index j, double value) {
  vals_[static_cast<size_t>(j)][slot(i, j)] += value;
}

double SymmetricSparseMatrix::value_or_zero(Index i, Index j) const {
  if (!pattern_.contains(i, j)) return 0.0;
  return vals_[static_cast<size_t>(j)][slot(i, j)];
}

double SymmetricSparseMatrix::value_sym(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  return value_or_zero(i, j);
}

}  // namespace gsi
