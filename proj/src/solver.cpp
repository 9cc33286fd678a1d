#include "gsi/solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cassert>
#include <cmath>

namespace gsi {

double LdlFactors::l_value(Index i, Index j) const {
  if (i == j) return 1.0;
  if (j > i) return 0.0;
  const auto& cols = rows[static_cast<size_t>(i)];
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return l[static_cast<size_t>(i)][static_cast<size_t>(it - cols.begin())];
}

double SelectedInverse::value(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  if (i == j) return y_diag[static_cast<size_t>(i)];
  const auto& cols = rows[static_cast<size_t>(i)];
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j)
    throw std::invalid_argument("entry " + to_string_1based({i, j}) + " not in pattern");
  return y[static_cast<size_t>(i)][static_cast<size_t>(it - cols.begin())];
}

LdlFactors ldl_factorize(const SymmetricSparseMatrix& a) {
  const Index n = a.n();
  LdlFactors f{symbolic_fill_in(a.pattern()), {}, {}, {}};
  f.rows = f.pattern.row_lists();
  f.l.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) f.l[static_cast<size_t>(i)].reserve(f.rows[static_cast<size_t>(i)].size());
  f.s.assign(static_cast<size_t>(n), 0.0);

  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a.value_or_zero(i, i)));
  const double pivot_floor = kPivotRelTol * max_diag;

  // columns ascending, rows ascending within a column; row i's value list
  // grows left to right as its columns complete
  for (Index j = 0; j < n; ++j) {
    const auto& row_j = f.rows[static_cast<size_t>(j)];
    const auto& lrow_j = f.l[static_cast<size_t>(j)];
    double acc = a.value_or_zero(j, j);
    for (size_t t = 0; t < row_j.size(); ++t) {
      double v = lrow_j[t];
      acc -= v * v * f.s[static_cast<size_t>(row_j[t])];
    }
    if (!(acc > pivot_floor)) throw NotPositiveDefiniteError(j, acc);
    f.s[static_cast<size_t>(j)] = acc;

    for (Index i : f.pattern.column(j)) {
      if (i == j) continue;
      const auto& row_i = f.rows[static_cast<size_t>(i)];
      const auto& lrow_i = f.l[static_cast<size_t>(i)];
      double num = a.value_or_zero(i, j);
      // merge the completed prefixes of rows j and i (all columns < j)
      size_t p = 0, q = 0;
      while (p < row_j.size() && q < lrow_i.size()) {
        if (row_j[p] == row_i[q]) {
          num -= lrow_j[p] * lrow_i[q] * f.s[static_cast<size_t>(row_j[p])];
          ++p, ++q;
        } else if (row_j[p] < row_i[q]) {
          ++p;
        } else {
          ++q;
        }
      }
      f.l[static_cast<size_t>(i)].push_back(num / f.s[static_cast<size_t>(j)]);
      assert(f.rows[static_cast<size_t>(i)][f.l[static_cast<size_t>(i)].size() - 1] == j);
    }
  }
  return f;
}

Solution solve_primary(const LdlFactors& factors, const std::vector<double>& b) {
  const Index n = factors.n();
  if (static_cast<Index>(b.size()) != n)
    throw std::invalid_argument("right-hand side has length " + std::to_string(b.size()) +
                                ", expected " + std::to_string(n));
  Solution sol;
  sol.w.assign(static_cast<size_t>(n), 0.0);
  sol.x.assign(static_cast<size_t>(n), 0.0);

  // L S w = b, forward
  for (Index i = 0; i < n; ++i) {
    const auto& cols = factors.rows[static_cast<size_t>(i)];
    const auto& lrow = factors.l[static_cast<size_t>(i)];
    double acc = b[static_cast<size_t>(i)];
    for (size_t t = 0; t < cols.size(); ++t)
      acc -= lrow[t] * factors.s[static_cast<size_t>(cols[t])] * sol.w[static_cast<size_t>(cols[t])];
    sol.w[static_cast<size_t>(i)] = acc / factors.s[static_cast<size_t>(i)];
  }

  // L^T x = w, backward; column i of L holds the rows k > i
  for (Index i = n - 1; i >= 0; --i) {
    double acc = sol.w[static_cast<size_t>(i)];
    for (Index k : factors.pattern.column(i)) {
      if (k == i) continue;
      acc -= factors.l_value(k, i) * sol.x[static_cast<size_t>(k)];
    }
    sol.x[static_cast<size_t>(i)] = acc;
  }
  return sol;
}

SelectedInverse selected_inverse(const LdlFactors& factors) {
  const Index n = factors.n();
  SelectedInverse si{factors.pattern, factors.rows, {}, {}};
  si.y.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    si.y[static_cast<size_t>(i)].assign(si.rows[static_cast<size_t>(i)].size(), 0.0);
  si.y_diag.assign(static_cast<size_t>(n), 0.0);

  // reverse basic order over the pattern: rows descending, columns
  // descending within a row (y_NN first)
  for (Index i = n - 1; i >= 0; --i) {
    const auto& cols = si.rows[static_cast<size_t>(i)];
    for (Index t = static_cast<Index>(cols.size()); t >= 0; --t) {
      const bool diag = (t == static_cast<Index>(cols.size()));
      const Index j = diag ? i : cols[static_cast<size_t>(t)];
      double acc = diag ? 1.0 / factors.s[static_cast<size_t>(j)] : 0.0;
      for (Index l : factors.pattern.column(j)) {
        if (l <= j) continue;
        const double lv = factors.l_value(l, j);
        if (l <= i)
          acc -= lv * si.value(i, l);
        else
          acc -= lv * si.value(l, i);
      }
      if (diag)
        si.y_diag[static_cast<size_t>(i)] = acc;
      else
        si.y[static_cast<size_t>(i)][static_cast<size_t>(t)] = acc;
    }
  }
  return si;
}

Eigen::MatrixXd dense_oracle_inverse(const SymmetricSparseMatrix& a) {
  const Index n = a.n();
  if (n > 500) throw std::invalid_argument("dense oracle guard: n must be <= 500");
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i : a.pattern().column(j)) {
      double v = a.value_or_zero(i, j);
      dense(i, j) = v;
      dense(j, i) = v;
    }
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("dense oracle: matrix is singular or not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(n, n));
}

GlobalSolution solve_global(const SymmetricSparseMatrix& a, const std::vector<double>& b) {
  LdlFactors factors = ldl_factorize(a);
  Solution solution = solve_primary(factors, b);
  SelectedInverse selinv = selected_inverse(factors);
  return {std::move(factors), std::move(solution), std::move(selinv)};
}

}  // namespace gsi
