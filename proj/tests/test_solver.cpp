#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "gsi/io.hpp"
#include "gsi/oracle_checks.hpp"
#include "gsi/solver.hpp"

using namespace gsi;
using Eigen::MatrixXd;

namespace {

SymmetricSparseMatrix two_by_two() {
  SparsityPattern p(2);
  p.insert(1, 0);
  SymmetricSparseMatrix a(p);
  a.set(0, 0, 4.0);
  a.set(1, 0, 2.0);
  a.set(1, 1, 3.0);
  return a;
}

SymmetricSparseMatrix identity_matrix(Index n) {
  SymmetricSparseMatrix a{SparsityPattern(n)};
  for (Index i = 0; i < n; ++i) a.set(i, i, 1.0);
  return a;
}

MatrixXd dense_of(const SymmetricSparseMatrix& a) {
  MatrixXd out = MatrixXd::Zero(a.n(), a.n());
  for (Index i = 0; i < a.n(); ++i)
    for (Index j = 0; j < a.n(); ++j) out(i, j) = a.value_sym(i, j);
  return out;
}

MatrixXd reconstruct(const LdlFactors& f) {
  MatrixXd l = MatrixXd::Identity(f.n(), f.n());
  for (Index i = 0; i < f.n(); ++i) {
    const auto& cols = f.rows[static_cast<size_t>(i)];
    for (size_t t = 0; t < cols.size(); ++t) l(i, cols[t]) = f.l[static_cast<size_t>(i)][t];
  }
  Eigen::VectorXd s(f.n());
  for (Index i = 0; i < f.n(); ++i) s(i) = f.s[static_cast<size_t>(i)];
  return l * s.asDiagonal() * l.transpose();
}

}  // namespace

TEST_CASE("factorizing the identity gives unit factors") {
  const auto f = ldl_factorize(identity_matrix(5));
  for (Index i = 0; i < 5; ++i) {
    CHECK(f.s[static_cast<size_t>(i)] == 1.0);
    CHECK(f.rows[static_cast<size_t>(i)].empty());
  }
}

TEST_CASE("2x2 factorization by hand") {
  const auto f = ldl_factorize(two_by_two());
  CHECK(f.l_value(1, 0) == 0.5);
  CHECK(f.s[0] == 4.0);
  CHECK(f.s[1] == 2.0);  // 3 - 0.25 * 4
}

TEST_CASE("reconstruction matches A on random SPD problems, fill included") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Index n = 5 + static_cast<Index>(seed % 46);
    const auto a = oracle::random_spd_matrix(n, seed % 2 == 0, seed);
    const auto f = ldl_factorize(a);
    const MatrixXd want = dense_of(a);
    const double tol = 1e-10 * want.cwiseAbs().maxCoeff();
    CHECK((reconstruct(f) - want).cwiseAbs().maxCoeff() <= tol);
    for (double s : f.s) CHECK(s > 0.0);
  }
}

TEST_CASE("factorization closes an open input pattern first") {
  SparsityPattern p(3);
  p.insert(1, 0);
  p.insert(2, 0);
  SymmetricSparseMatrix a(p);
  a.set(0, 0, 4.0);
  a.set(1, 1, 4.0);
  a.set(2, 2, 4.0);
  a.set(1, 0, 1.0);
  a.set(2, 0, 1.0);
  const auto f = ldl_factorize(a);
  CHECK(f.pattern.contains(2, 1));  // fill-in entry
  const double tol = 1e-10 * 4.0;
  CHECK((reconstruct(f) - dense_of(a)).cwiseAbs().maxCoeff() <= tol);
}

TEST_CASE("indefinite and singular matrices are rejected with the failing index") {
  SparsityPattern p(2);
  p.insert(1, 0);
  SymmetricSparseMatrix bad(p);
  bad.set(0, 0, 1.0);
  bad.set(1, 0, 2.0);
  bad.set(1, 1, 1.0);  // eigenvalues -1 and 3
  try {
    ldl_factorize(bad);
    FAIL("expected a pivot failure");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.index == 1);
  }

  SymmetricSparseMatrix zero{SparsityPattern(2)};
  CHECK_THROWS_AS(ldl_factorize(zero), NotPositiveDefiniteError);
}

TEST_CASE("solve_primary: identity passes b through") {
  const auto f = ldl_factorize(identity_matrix(4));
  const std::vector<double> b{1.0, -2.0, 0.5, 3.0};
  const auto sol = solve_primary(f, b);
  CHECK(sol.x == b);
}

TEST_CASE("solve_primary: 2x2 by hand") {
  const auto sol = solve_primary(ldl_factorize(two_by_two()), {1.0, 0.0});
  CHECK(sol.x[0] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(sol.x[1] == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("solve_primary rejects a wrong-length right-hand side") {
  const auto f = ldl_factorize(identity_matrix(3));
  CHECK_THROWS_AS(solve_primary(f, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("primary residual stays below 1e-10 on random problems") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 50;
    const auto a = oracle::random_spd_matrix(n, seed % 2 == 0, seed);
    const auto b = oracle::random_vector(n, seed + 100);
    const auto sol = solve_primary(ldl_factorize(a), b);
    const MatrixXd ad = dense_of(a);
    Eigen::VectorXd bx(n), xx(n);
    for (Index i = 0; i < n; ++i) {
      bx(i) = b[static_cast<size_t>(i)];
      xx(i) = sol.x[static_cast<size_t>(i)];
    }
    CHECK((ad * xx - bx).norm() <= 1e-10 * bx.norm());
  }
}

TEST_CASE("selected inverse of the identity") {
  const auto si = selected_inverse(ldl_factorize(identity_matrix(4)));
  for (Index i = 0; i < 4; ++i) CHECK(si.value(i, i) == 1.0);
}

TEST_CASE("selected inverse: 2x2 by hand") {
  const auto si = selected_inverse(ldl_factorize(two_by_two()));
  CHECK(si.value(0, 0) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(si.value(1, 0) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(si.value(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("selected inverse matches the dense inverse on the pattern") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Index n = 5 + static_cast<Index>((seed * 7) % 46);
    const auto a = oracle::random_spd_matrix(n, seed % 2 == 0, seed);
    const auto f = ldl_factorize(a);
    const auto si = selected_inverse(f);
    const MatrixXd inv = dense_oracle_inverse(a);
    const double scale = inv.cwiseAbs().maxCoeff();
    for (const auto& e : f.pattern.entries()) {
      const double want = inv(e.row, e.col);
      const double got = si.value(e.row, e.col);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(std::abs(want), scale));
    }
    for (Index i = 0; i < n; ++i) CHECK(si.value(i, i) > 0.0);
  }
}

TEST_CASE("sparse recursions equal the dense partitioned solves at small n") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed)
    CHECK(oracle::check_recursions_vs_dense(8, seed) == "");
}

TEST_CASE("dense oracle inverse basics") {
  const MatrixXd identity_inverse = dense_oracle_inverse(identity_matrix(3));
  CHECK(identity_inverse.isApprox(MatrixXd::Identity(3, 3), 1e-14));

  const MatrixXd inv = dense_oracle_inverse(two_by_two());
  CHECK(inv(0, 0) == doctest::Approx(3.0 / 8).epsilon(1e-12));
  CHECK(inv(0, 1) == doctest::Approx(-2.0 / 8).epsilon(1e-12));
  CHECK(inv(1, 1) == doctest::Approx(4.0 / 8).epsilon(1e-12));
  CHECK((dense_of(two_by_two()) * inv).isApprox(MatrixXd::Identity(2, 2), 1e-10));
}

TEST_CASE("dense oracle guard and singularity error") {
  CHECK_THROWS_AS(dense_oracle_inverse(identity_matrix(501)), std::invalid_argument);
  SymmetricSparseMatrix zero{SparsityPattern(2)};
  CHECK_THROWS_AS(dense_oracle_inverse(zero), std::runtime_error);
}

TEST_CASE("matrix market round trip") {
  const auto a = oracle::random_spd_matrix(12, true, 77);
  std::stringstream buf;
  io::write_matrix_market(buf, a);
  const auto back = io::read_matrix_market(buf);
  CHECK(back.pattern() == a.pattern());
  for (const auto& e : a.pattern().entries())
    CHECK(back.value_or_zero(e.row, e.col) == a.value_or_zero(e.row, e.col));

  std::stringstream vbuf;
  const auto b = oracle::random_vector(12, 3);
  io::write_vector_market(vbuf, b);
  CHECK(io::read_vector_market(vbuf) == b);
}

TEST_CASE("matrix market rejects malformed input") {
  std::stringstream no_banner("1 1 1\n1 1 2.0\n");
  CHECK_THROWS_AS(io::read_matrix_market(no_banner), std::invalid_argument);
  std::stringstream general("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2.0\n");
  CHECK_THROWS_AS(io::read_matrix_market(general), std::invalid_argument);
  std::stringstream truncated("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2.0\n");
  CHECK_THROWS_AS(io::read_matrix_market(truncated), std::invalid_argument);
}

TEST_CASE("selected inverse serialization") {
  const auto si = selected_inverse(ldl_factorize(two_by_two()));
  std::stringstream buf;
  io::write_selected_inverse(buf, si);
  std::string line;
  std::getline(buf, line);
  CHECK(line == "N 2");
  std::getline(buf, line);
  CHECK(line.starts_with("1 1 0.375"));
}
