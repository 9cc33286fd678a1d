#include "gsi/oracle_checks.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

namespace gsi::oracle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Index draw_n(Index n_max, std::mt19937_64& rng) {
  return 2 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n_max - 1));
}

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

std::string describe(double err, const std::string& what) {
  std::ostringstream out;
  out << what << " deviates by " << err;
  return out.str();
}

std::string near(const MatrixXd& got, const MatrixXd& want, double rel_tol,
                 const std::string& what) {
  const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
  const double err = (got - want).cwiseAbs().maxCoeff();
  if (err > rel_tol * scale) return describe(err, what);
  return "";
}

std::string exact(const MatrixXd& got, const MatrixXd& want, const std::string& what) {
  if (got == want) return "";
  return describe((got - want).cwiseAbs().maxCoeff(), what);
}

}  // namespace

SparsityPattern random_closed_pattern(Index n, bool loopy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SparsityPattern base(n);
  for (Index v = 1; v < n; ++v) {
    const Index parent = static_cast<Index>(rng() % static_cast<std::uint64_t>(v));
    base.insert(v, parent);
  }
  if (loopy && n >= 3) {
    const Index extra = std::max<Index>(1, n / 4);
    for (Index e = 0; e < extra; ++e) {
      Index a = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      Index b = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      if (a == b) continue;
      base.insert(std::max(a, b), std::min(a, b));
    }
  }
  return symbolic_fill_in(base);
}

SymmetricSparseMatrix random_spd_matrix(Index n, bool loopy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SparsityPattern pattern(n);
  for (Index v = 1; v < n; ++v) {
    const Index parent = static_cast<Index>(rng() % static_cast<std::uint64_t>(v));
    pattern.insert(v, parent);
  }
  if (loopy && n >= 3) {
    const Index extra = std::max<Index>(1, n / 4);
    for (Index e = 0; e < extra; ++e) {
      Index a = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      Index b = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      if (a == b) continue;
      pattern.insert(std::max(a, b), std::min(a, b));
    }
  }
  const MatrixXd m = random_matrix(n, n, rng);
  const MatrixXd mtm = m.transpose() * m;
  SymmetricSparseMatrix a(pattern);
  for (const auto& e : a.pattern().entries())
    a.set(e.row, e.col, mtm(e.row, e.col) + (e.row == e.col ? n : 0.0));
  return a;
}

LdlFactors random_factors(Index n, bool loopy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lu(-1.0, 1.0);
  std::uniform_real_distribution<double> su(0.5, 2.0);
  LdlFactors f{random_closed_pattern(n, loopy, seed * 977 + 13), {}, {}, {}};
  f.rows = f.pattern.row_lists();
  f.l.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (size_t t = 0; t < f.rows[static_cast<size_t>(i)].size(); ++t)
      f.l[static_cast<size_t>(i)].push_back(lu(rng));
  f.s.resize(static_cast<size_t>(n));
  for (auto& s : f.s) s = su(rng);
  return f;
}

std::vector<double> random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

std::string check_theorem1_closure(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const auto order = kron::ultimate_triangular_order(n, f.pattern);
  const MatrixXd c = kron::build_c(f, order);
  for (Index row = 0; row < order.m(); ++row) {
    const auto& rc = order.at(row);
    if (!f.pattern.contains(rc.row, rc.col)) continue;  // row in L-bar
    for (Index col = 0; col < order.m(); ++col) {
      const auto& kl = order.at(col);
      if (f.pattern.contains(kl.row, kl.col)) continue;  // col in L
      const double via_formula = kron::entry_c(rc, kl, f);
      if (via_formula != 0.0 || c(row, col) != 0.0)
        return "C" + to_string_1based(rc) + "," + to_string_1based(kl) + " = " +
               std::to_string(c(row, col)) + " should vanish";
    }
  }
  return "";
}

std::string check_c_upper_triangular_basic(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const MatrixXd c = kron::build_c(f, kron::basic_triangular_order(n));
  for (Eigen::Index r = 0; r < c.rows(); ++r)
    for (Eigen::Index col = 0; col < r; ++col)
      if (c(r, col) != 0.0) return describe(c(r, col), "lower entry of C under basic order");
  return "";
}

std::string check_g_lower_triangular_basic(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const MatrixXd g = kron::build_g(f, kron::basic_triangular_order(n));
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index col = r + 1; col < g.cols(); ++col)
      if (g(r, col) != 0.0) return describe(g(r, col), "upper entry of G under basic order");
  return "";
}

std::string check_ultimate_blocks(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const auto order = kron::ultimate_triangular_order(n, f.pattern);
  const Index split = order.m() - static_cast<Index>(f.pattern.size());  // |L-bar|
  const MatrixXd c = kron::build_c(f, order);
  const MatrixXd g = kron::build_g(f, order);
  // C and G stay triangular under the ultimate order
  for (Eigen::Index r = 0; r < c.rows(); ++r)
    for (Eigen::Index col = 0; col < r; ++col)
      if (c(r, col) != 0.0) return describe(c(r, col), "lower entry of C under ultimate order");
  for (Eigen::Index r = 0; r < g.rows(); ++r)
    for (Eigen::Index col = r + 1; col < g.cols(); ++col)
      if (g(r, col) != 0.0) return describe(g(r, col), "upper entry of G under ultimate order");
  // the partition blocks: C's lower-left and G's upper-right vanish
  if (split > 0) {
    if (c.bottomLeftCorner(order.m() - split, split).cwiseAbs().maxCoeff() != 0.0)
      return "bottom-left block of C is not zero";
    if (g.topRightCorner(split, order.m() - split).cwiseAbs().maxCoeff() != 0.0)
      return "top-right block of G is not zero";
  }
  return "";
}

std::string check_entry_formulas(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const auto order = kron::basic_triangular_order(n);
  const MatrixXd c = kron::build_c(f, order);
  const MatrixXd g = kron::build_g(f, order);
  const VectorXd d = kron::build_d(f, order);
  for (Index r = 0; r < order.m(); ++r) {
    if (kron::entry_d(order.at(r), f) != d(r)) return "d entry formula mismatch";
    for (Index col = 0; col < order.m(); ++col) {
      if (kron::entry_c(order.at(r), order.at(col), f) != c(r, col))
        return "C entry formula mismatch at " + to_string_1based(order.at(r)) + "," +
               to_string_1based(order.at(col));
      if (kron::entry_g(order.at(r), order.at(col), f) != g(r, col))
        return "G entry formula mismatch at " + to_string_1based(order.at(r)) + "," +
               to_string_1based(order.at(col));
    }
  }
  return "";
}

std::string check_kron_identities(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const Index m = draw_n(n_max, rng);
  const MatrixXd a = random_matrix(n, n, rng);
  const MatrixXd b = random_matrix(m, m, rng);
  const MatrixXd c3 = random_matrix(n, m, rng);  // for vec(ABC): A n*n, B n*m, C m*m
  const MatrixXd b_rect = random_matrix(n, m, rng);
  const VectorXd va = random_matrix(n, 1, rng);
  const VectorXd vb = random_matrix(m, 1, rng);

  if (kron::vec(va) != va) return "vec of a column vector changed it";
  std::string err;
  if (!(err = exact(kron::vec(va * vb.transpose()), kron::kronecker(vb, va), "vec(ab^T) = b kron a"))
           .empty())
    return err;
  if (!(err = near(kron::vec(a * b_rect * b), kron::kronecker(b.transpose(), a) * kron::vec(b_rect),
                   1e-9, "vec(ABC) = (C^T kron A) vec(B)"))
           .empty())
    return err;
  {
    const MatrixXd a2 = random_matrix(n, m, rng);
    const double lhs = kron::vec(a2).dot(kron::vec(b_rect));
    const double rhs = (a2.transpose() * b_rect).trace();
    if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
      return "vec(A)^T vec(B) = tr(A^T B) fails";
  }
  {
    const MatrixXd c = random_matrix(n, n, rng);
    const MatrixXd d = random_matrix(m, m, rng);
    if (!(err = near(kron::kronecker(a, b) * kron::kronecker(c, d),
                     kron::kronecker(a * c, b * d), 1e-9, "(A kron B)(C kron D)"))
             .empty())
      return err;
  }
  if (std::abs(a.determinant()) > 1e-3 && std::abs(b.determinant()) > 1e-3) {
    if (!(err = near(kron::kronecker(a, b).inverse(), kron::kronecker(a.inverse(), b.inverse()),
                     1e-6, "(A kron B)^-1"))
             .empty())
      return err;
  }
  if (!(err = exact(kron::kronecker(a, b).transpose(), kron::kronecker(a.transpose(), b.transpose()),
                    "(A kron B)^T"))
           .empty())
    return err;
  {
    const double lhs = kron::kronecker(a, b).determinant();
    const double rhs = std::pow(a.determinant(), m) * std::pow(b.determinant(), n);
    if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
      return "|A kron B| = |A|^M |B|^N fails";
  }
  {
    const double lhs = kron::kronecker(a, b).trace();
    const double rhs = a.trace() * b.trace();
    if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
      return "tr(A kron B) = tr(A) tr(B) fails";
  }
  return "";
}

std::string check_elim_dup_identities(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const MatrixXd dense_l = kron::dense_l(f);
  const MatrixXd identity_n2 = MatrixXd::Identity(n, n);

  const std::vector<kron::SecondaryOrder> orders = {
      kron::basic_triangular_order(n), kron::ultimate_triangular_order(n, f.pattern)};
  for (const auto& order : orders) {
    const MatrixXd e = kron::elimination_matrix(order);
    const MatrixXd d = kron::duplication_matrix(order);
    std::string err;
    if (!(err = exact(e * d, MatrixXd::Identity(order.m(), order.m()), "E D = 1")).empty())
      return err;
    {
      MatrixXd sym = random_matrix(n, n, rng);
      sym = (sym + sym.transpose()).eval();
      if (!(err = exact(d * (e * kron::vec(sym)), kron::vec(sym), "D E vec(S) = vec(S)")).empty())
        return err;
    }
    {
      MatrixXd lower = random_matrix(n, n, rng);
      lower = lower.triangularView<Eigen::Lower>();
      const MatrixXd diag = lower.diagonal().asDiagonal();
      if (!(err = exact(e * kron::vec(lower), e * kron::vec(diag),
                        "E vec(L) = E vec(diag(L))"))
               .empty())
        return err;
    }
    {
      MatrixXd lower = random_matrix(n, n, rng);
      lower = lower.triangularView<Eigen::Lower>();
      const MatrixXd ekl = e * kron::kronecker(identity_n2, lower);
      if (!(err = near(ekl * d * e, ekl, 1e-12, "E(1 kron L)DE = E(1 kron L)")).empty())
        return err;
    }
    {
      // unit lower triangle keeps the inverse well conditioned at this scale
      const MatrixXd g = e * kron::kronecker(identity_n2, dense_l) * d;
      const MatrixXd g_inv_direct = g.inverse();
      const MatrixXd l_inv = dense_l.inverse();
      const MatrixXd g_of_inv = e * kron::kronecker(identity_n2, l_inv) * d;
      if (!(err = near(g_inv_direct, g_of_inv, 1e-9, "(E(1 kron L)D)^-1 = E(1 kron L^-1)D"))
               .empty())
        return err;
    }
  }
  return "";
}

std::string check_printed_e_d_n3(std::uint64_t) {
  const auto order = kron::basic_triangular_order(3);
  const MatrixXd e = kron::elimination_matrix(order);
  const MatrixXd d = kron::duplication_matrix(order);
  MatrixXd e_want(6, 9);
  e_want << 1, 0, 0, 0, 0, 0, 0, 0, 0,  //
      0, 0, 0, 1, 0, 0, 0, 0, 0,        //
      0, 0, 0, 0, 1, 0, 0, 0, 0,        //
      0, 0, 0, 0, 0, 0, 1, 0, 0,        //
      0, 0, 0, 0, 0, 0, 0, 1, 0,        //
      0, 0, 0, 0, 0, 0, 0, 0, 1;
  MatrixXd d_want(9, 6);
  d_want << 1, 0, 0, 0, 0, 0,  //
      0, 1, 0, 0, 0, 0,        //
      0, 0, 0, 1, 0, 0,        //
      0, 1, 0, 0, 0, 0,        //
      0, 0, 1, 0, 0, 0,        //
      0, 0, 0, 0, 1, 0,        //
      0, 0, 0, 1, 0, 0,        //
      0, 0, 0, 0, 1, 0,        //
      0, 0, 0, 0, 0, 1;
  if (e != e_want) return "elimination matrix for n=3 differs from the reference";
  if (d != d_want) return "duplication matrix for n=3 differs from the reference";
  return "";
}

std::string check_recursions_vs_dense(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const SymmetricSparseMatrix a = random_spd_matrix(n, (seed % 2) == 0, seed);
  const std::vector<double> b = random_vector(n, seed ^ 0x9e3779b97f4a7c15ull);
  const GlobalSolution g = solve_global(a, b);
  const auto order = kron::ultimate_triangular_order(n, g.factors.pattern);
  const Index m = order.m();
  const Index split = m - static_cast<Index>(g.factors.pattern.size());

  const MatrixXd cm = kron::build_c(g.factors, order);
  const MatrixXd gm = kron::build_g(g.factors, order);
  const VectorXd d = kron::build_d(g.factors, order);
  const VectorXd h = kron::build_h(a, order);

  // G22 v2 = h2 by dense triangular solve; v_ij = L_ij S_jj
  const MatrixXd g22 = gm.bottomRightCorner(m - split, m - split);
  const VectorXd v2 = g22.triangularView<Eigen::Lower>().solve(h.tail(m - split));
  for (Index k = split; k < m; ++k) {
    const auto& p = order.at(k);
    const double want = g.factors.l_value(p.row, p.col) * g.factors.s[static_cast<size_t>(p.col)];
    if (std::abs(v2(k - split) - want) > 1e-12 * std::max(1.0, std::abs(want)))
      return "dense v2 disagrees with the factorization at " + to_string_1based(p);
  }

  // C22 y2 = d2 by dense triangular solve; y_ij from the selected inverse
  const MatrixXd c22 = cm.bottomRightCorner(m - split, m - split);
  const VectorXd y2 = c22.triangularView<Eigen::Upper>().solve(d.tail(m - split));
  for (Index k = split; k < m; ++k) {
    const auto& p = order.at(k);
    const double want = g.selinv.value(p.row, p.col);
    if (std::abs(y2(k - split) - want) > 1e-12 * std::max(1.0, std::abs(want)))
      return "dense y2 disagrees with the selected inverse at " + to_string_1based(p);
  }

  // h1 and v1 vanish: the first partition holds no nonzero of S L^T or A
  if (split > 0 && h.head(split).cwiseAbs().maxCoeff() != 0.0)
    return "h1 is not zero under the ultimate order";
  return "";
}

std::string check_reduction_chains(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const LdlFactors f = random_factors(n, true, seed);
  const MatrixXd l = kron::dense_l(f);
  const VectorXd s = kron::dense_s(f);
  const MatrixXd identity_n = MatrixXd::Identity(n, n);
  const MatrixXd ls = l * MatrixXd(s.asDiagonal());
  const MatrixXd a = l * MatrixXd(s.asDiagonal()) * l.transpose();

  for (const auto& order :
       {kron::basic_triangular_order(n), kron::ultimate_triangular_order(n, f.pattern)}) {
    const MatrixXd e = kron::elimination_matrix(order);
    const MatrixXd d = kron::duplication_matrix(order);
    std::string err;
    // the factorization chain: E(1 kron LSL^T)D = E(1 kron LS)D E(1 kron L^T)D
    const MatrixXd lhs = e * kron::kronecker(identity_n, a) * d;
    const MatrixXd rhs = (e * kron::kronecker(identity_n, ls) * d) *
                         (e * kron::kronecker(identity_n, l.transpose()) * d);
    if (!(err = near(lhs, rhs, 1e-9, "E(1 kron LSL^T)D product chain")).empty()) return err;
    // the right-hand-side reduction: (E(1 kron LS)D)^-1 E vec(1) = E vec(S^-1)
    const MatrixXd gls = e * kron::kronecker(identity_n, ls) * d;
    const VectorXd reduced = gls.inverse() * (e * kron::vec(identity_n));
    const MatrixXd s_inv = s.cwiseInverse().asDiagonal();
    if (!(err = near(reduced, e * kron::vec(s_inv), 1e-9, "rhs reduction to E vec(S^-1)"))
             .empty())
      return err;
  }
  return "";
}

std::string check_ultimate_is_swap_fixed_point(Index n_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = draw_n(n_max, rng);
  const SparsityPattern closed = random_closed_pattern(n, true, seed);
  // brute force: swap adjacent (member, non-member) pairs until none remain
  std::vector<IndexPair> seq = kron::basic_triangular_order(n).sequence();
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (size_t k = 0; k + 1 < seq.size(); ++k) {
      if (closed.contains(seq[k].row, seq[k].col) &&
          !closed.contains(seq[k + 1].row, seq[k + 1].col)) {
        std::swap(seq[k], seq[k + 1]);
        swapped = true;
      }
    }
  }
  const auto ultimate = kron::ultimate_triangular_order(n, closed);
  if (seq != ultimate.sequence())
    return "exhaustive swaps and the stable partition disagree";
  return "";
}

std::vector<NamedCheck> all_checks(Index n_max) {
  return {
      {"closure-of-L (C vanishes on L rows, L-bar columns)",
       [n_max](std::uint64_t s) { return check_theorem1_closure(n_max, s); }},
      {"C upper triangular under the basic order",
       [n_max](std::uint64_t s) { return check_c_upper_triangular_basic(n_max, s); }},
      {"G lower triangular under the basic order",
       [n_max](std::uint64_t s) { return check_g_lower_triangular_basic(n_max, s); }},
      {"ultimate-order block structure of C and G",
       [n_max](std::uint64_t s) { return check_ultimate_blocks(n_max, s); }},
      {"closed-form C/G/d entries match dense constructions",
       [n_max](std::uint64_t s) { return check_entry_formulas(n_max, s); }},
      {"Kronecker and vectorization identities",
       [n_max](std::uint64_t s) { return check_kron_identities(n_max, s); }},
      {"elimination/duplication identities",
       [n_max](std::uint64_t s) { return check_elim_dup_identities(n_max, s); }},
      {"n=3 elimination/duplication reference matrices",
       [](std::uint64_t s) { return check_printed_e_d_n3(s); }},
      {"sparse recursions equal dense triangular solves",
       [n_max](std::uint64_t s) { return check_recursions_vs_dense(n_max, s); }},
      {"factorization and right-hand-side reduction chains",
       [n_max](std::uint64_t s) { return check_reduction_chains(n_max, s); }},
      {"ultimate order is the adjacent-swap fixed point",
       [n_max](std::uint64_t s) { return check_ultimate_is_swap_fixed_point(n_max, s); }},
  };
}

}  // namespace gsi::oracle
