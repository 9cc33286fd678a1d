#include "gsi/kron.hpp"

#include <algorithm>
#include <map>

namespace gsi::kron {

namespace {

void check_oracle_n(Index n) {
  if (n > kMaxOracleN)
    throw std::invalid_argument("dense oracle guard: n must be <= " +
                                std::to_string(kMaxOracleN));
}

}  // namespace

SecondaryOrder::SecondaryOrder(Index n, std::vector<IndexPair> sequence)
    : n_(n), sequence_(std::move(sequence)) {
  const size_t m = static_cast<size_t>(n) * (static_cast<size_t>(n) + 1) / 2;
  if (sequence_.size() != m)
    throw std::invalid_argument("secondary order must list all n(n+1)/2 pairs");
  std::vector<IndexPair> sorted = sequence_;
  std::sort(sorted.begin(), sorted.end());
  for (size_t k = 0; k < sorted.size(); ++k) {
    const auto& p = sorted[k];
    if (p.col < 0 || p.col > p.row || p.row >= n || (k > 0 && sorted[k - 1] == p))
      throw std::invalid_argument("secondary order is not a permutation of the lower triangle");
  }
}

Index SecondaryOrder::position(IndexPair p) const {
  for (size_t k = 0; k < sequence_.size(); ++k)
    if (sequence_[k] == p) return static_cast<Index>(k);
  throw std::invalid_argument("pair " + to_string_1based(p) + " not in order");
}

SecondaryOrder basic_triangular_order(Index n) {
  std::vector<IndexPair> seq;
  seq.reserve(static_cast<size_t>(n) * (static_cast<size_t>(n) + 1) / 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) seq.push_back({i, j});
  return SecondaryOrder(n, std::move(seq));
}

SecondaryOrder ultimate_triangular_order(Index n, const SparsityPattern& l_pattern) {
  if (l_pattern.n() != n) throw std::invalid_argument("pattern dimension mismatch");
  if (!l_pattern.is_closed())
    throw std::invalid_argument("ultimate order requires a four-corners-closed pattern");
  std::vector<IndexPair> seq;
  seq.reserve(static_cast<size_t>(n) * (static_cast<size_t>(n) + 1) / 2);
  const SecondaryOrder basic = basic_triangular_order(n);
  for (const auto& p : basic.sequence())
    if (!l_pattern.contains(p.row, p.col)) seq.push_back(p);
  for (const auto& p : basic.sequence())
    if (l_pattern.contains(p.row, p.col)) seq.push_back(p);
  return SecondaryOrder(n, std::move(seq));
}

Eigen::VectorXd vec(const Eigen::MatrixXd& a) {
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXd elimination_matrix(const SecondaryOrder& order) {
  const Index n = order.n();
  check_oracle_n(n);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(order.m(), static_cast<Index>(n) * n);
  for (Index m = 0; m < order.m(); ++m) {
    const auto& p = order.at(m);
    // row is vec(1_ji)^T: the single one sits at column-major slot (j, i)
    e(m, p.row * n + p.col) = 1.0;
  }
  return e;
}

Eigen::MatrixXd duplication_matrix(const SecondaryOrder& order) {
  const Index n = order.n();
  check_oracle_n(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Index>(n) * n, order.m());
  for (Index m = 0; m < order.m(); ++m) {
    const auto& p = order.at(m);
    d(p.row * n + p.col, m) = 1.0;                     // vec slot of 1_ji
    if (p.row != p.col) d(p.col * n + p.row, m) = 1.0; // vec slot of 1_ij
  }
  return d;
}

Eigen::MatrixXd dense_l(const LdlFactors& factors) {
  const Index n = factors.n();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& cols = factors.rows[static_cast<size_t>(i)];
    for (size_t t = 0; t < cols.size(); ++t) l(i, cols[t]) = factors.l[static_cast<size_t>(i)][t];
  }
  return l;
}

Eigen::VectorXd dense_s(const LdlFactors& factors) {
  return Eigen::Map<const Eigen::VectorXd>(factors.s.data(),
                                           static_cast<Eigen::Index>(factors.s.size()));
}

Eigen::MatrixXd dense_a(const SymmetricSparseMatrix& a) {
  const Index n = a.n();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i : a.pattern().column(j)) {
      const double v = a.value_or_zero(i, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

double entry_c(IndexPair rc, IndexPair kl, const LdlFactors& factors) {
  const Index n = factors.n();
  if (rc.row >= n || kl.row >= n || rc.col < 0 || kl.col < 0 || rc.col > rc.row ||
      kl.col > kl.row)
    throw std::invalid_argument("index pair out of range");
  const auto [i, j] = rc;
  const auto [k, l] = kl;
  double out = 0.0;
  if (i == k) out += factors.l_value(l, j);
  if (i == l && k != l) out += factors.l_value(k, j);
  return out;
}

double entry_g(IndexPair rc, IndexPair kl, const LdlFactors& factors) {
  const Index n = factors.n();
  if (rc.row >= n || kl.row >= n || rc.col < 0 || kl.col < 0 || rc.col > rc.row ||
      kl.col > kl.row)
    throw std::invalid_argument("index pair out of range");
  return rc.row == kl.row ? factors.l_value(rc.col, kl.col) : 0.0;
}

double entry_d(IndexPair rc, const LdlFactors& factors) {
  if (rc.row >= factors.n() || rc.col < 0 || rc.col > rc.row)
    throw std::invalid_argument("index pair out of range");
  if (rc.row != rc.col) return 0.0;
  const double s = factors.s[static_cast<size_t>(rc.col)];
  if (!(s > 0.0)) throw NotPositiveDefiniteError(rc.col, s);
  return 1.0 / s;
}

Eigen::MatrixXd build_c(const LdlFactors& factors, const SecondaryOrder& order) {
  check_oracle_n(order.n());
  const Index n = order.n();
  const Eigen::MatrixXd e = elimination_matrix(order);
  const Eigen::MatrixXd d = duplication_matrix(order);
  return e * kronecker(Eigen::MatrixXd::Identity(n, n), dense_l(factors).transpose()) * d;
}

Eigen::MatrixXd build_g(const LdlFactors& factors, const SecondaryOrder& order) {
  check_oracle_n(order.n());
  const Index n = order.n();
  const Eigen::MatrixXd e = elimination_matrix(order);
  const Eigen::MatrixXd d = duplication_matrix(order);
  return e * kronecker(Eigen::MatrixXd::Identity(n, n), dense_l(factors)) * d;
}

Eigen::VectorXd build_d(const LdlFactors& factors, const SecondaryOrder& order) {
  check_oracle_n(order.n());
  Eigen::MatrixXd s_inv = dense_s(factors).cwiseInverse().asDiagonal();
  return elimination_matrix(order) * vec(s_inv);
}

Eigen::VectorXd build_h(const SymmetricSparseMatrix& a, const SecondaryOrder& order) {
  check_oracle_n(order.n());
  return elimination_matrix(order) * vec(dense_a(a));
}

}  // namespace gsi::kron
