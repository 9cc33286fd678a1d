#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "demo6_expected.hpp"
#include "gsi/factor_graph.hpp"
#include "gsi/mp.hpp"
#include "gsi/oracle_checks.hpp"
#include "gsi/pattern.hpp"
#include "gsi/solver.hpp"

using namespace gsi;
using mp::Var;
using mp::VarKind;

namespace {

FactorGraphTopology demo6_topology() {
  return FactorGraphTopology{6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}}};
}

mp::CommGraph comm_for(const SymmetricSparseMatrix& a) {
  const auto closed = symbolic_fill_in(a.pattern());
  mp::CommGraph comm{a.n(), std::vector<std::vector<Index>>(static_cast<size_t>(a.n()))};
  for (const auto& e : closed.entries()) {
    if (e.row == e.col) continue;
    comm.neighbors[static_cast<size_t>(e.row)].push_back(e.col);
    comm.neighbors[static_cast<size_t>(e.col)].push_back(e.row);
  }
  for (auto& nbrs : comm.neighbors) std::sort(nbrs.begin(), nbrs.end());
  return comm;
}

std::pair<SymmetricSparseMatrix, std::vector<double>> demo6_problem(std::uint64_t seed) {
  const auto graph = gen_demo6(seed);
  return assemble_system(graph, PrimaryOrder::identity(6));
}

bool equal_solutions(const GlobalSolution& a, const GlobalSolution& b, double tol) {
  const auto err = mp::convergence_error(a, b);
  return err.max() <= tol;
}

}  // namespace

TEST_CASE("communication graph of a chain has only adjacent links") {
  FactorGraphTopology chain{5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}};
  const auto comm = mp::discover_comm_graph(chain, PrimaryOrder::identity(5));
  CHECK(comm.links() == std::vector<IndexPair>{{1, 0}, {2, 1}, {3, 2}, {4, 3}});
}

TEST_CASE("communication graph of the demo adds the two extra channels") {
  const auto comm = mp::discover_comm_graph(demo6_topology(), PrimaryOrder::identity(6));
  CHECK(comm.linked(5, 2));  // beyond the factors
  CHECK(comm.linked(5, 3));
  CHECK(comm.links().size() == 8);  // 6 factor links + 2 discovered
}

TEST_CASE("communication graph equals the closed pattern for random graphs") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 3 + static_cast<Index>(rng() % 12);
    FactorGraphTopology g{n, {}};
    for (Index v = 1; v < n; ++v)
      g.factors.push_back({static_cast<Index>(rng() % static_cast<std::uint64_t>(v)), v});
    for (int e = 0; e < 3; ++e) {
      Index a = static_cast<Index>(rng() % n), b = static_cast<Index>(rng() % n);
      if (a != b) g.factors.push_back({std::min(a, b), std::max(a, b)});
    }
    const auto order = random_order(n, trial);
    const auto comm = mp::discover_comm_graph(g, order);
    const auto closed = symbolic_fill_in(pattern_from_graph(g, order));
    CHECK(comm.to_pattern() == closed);
  }
}

TEST_CASE("responsibilities: the top agent of the demo owns its whole row") {
  const auto comm = mp::discover_comm_graph(demo6_topology(), PrimaryOrder::identity(6));
  const auto owned = mp::assign_responsibilities(comm);
  const std::vector<Var> want = {
      {VarKind::S, 5, 5}, {VarKind::W, 5, 5}, {VarKind::X, 5, 5}, {VarKind::Y, 5, 5},
      {VarKind::L, 5, 1}, {VarKind::Y, 5, 1}, {VarKind::L, 5, 2}, {VarKind::Y, 5, 2},
      {VarKind::L, 5, 3}, {VarKind::Y, 5, 3}, {VarKind::L, 5, 4}, {VarKind::Y, 5, 4}};
  CHECK(owned[5] == want);
}

TEST_CASE("responsibilities: lone agent owns exactly its four scalars") {
  mp::CommGraph comm{1, {{}}};
  const auto owned = mp::assign_responsibilities(comm);
  CHECK(owned[0].size() == 4);
}

TEST_CASE("responsibilities partition every variable exactly once") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 10);
    const auto closed = oracle::random_closed_pattern(n, true, 100 + trial);
    mp::CommGraph comm{n, std::vector<std::vector<Index>>(static_cast<size_t>(n))};
    for (const auto& e : closed.entries()) {
      if (e.row == e.col) continue;
      comm.neighbors[static_cast<size_t>(e.row)].push_back(e.col);
      comm.neighbors[static_cast<size_t>(e.col)].push_back(e.row);
    }
    for (auto& nbrs : comm.neighbors) std::sort(nbrs.begin(), nbrs.end());

    std::set<Var> seen;
    size_t total = 0;
    for (const auto& agent : mp::assign_responsibilities(comm)) {
      for (const auto& v : agent) {
        CHECK(seen.insert(v).second);
        CHECK(mp::owner_of(v) == v.i);
        ++total;
      }
    }
    // 4 scalars per agent plus L and y per off-diagonal entry
    CHECK(total == 4 * static_cast<size_t>(n) + 2 * static_cast<size_t>(closed.size() - n));
  }
}

TEST_CASE("message plan: chains carry only the standard slots") {
  FactorGraphTopology chain{4, {{0, 1}, {1, 2}, {2, 3}}};
  const auto comm = mp::discover_comm_graph(chain, PrimaryOrder::identity(4));
  const auto plan = mp::build_message_plan(comm);
  for (const auto& [edge, vars] : plan.slots) {
    const auto [from, to] = edge;
    if (from < to)
      CHECK(vars == std::vector<Var>{{VarKind::S, from, from}, {VarKind::W, from, from}});
    else
      CHECK(vars == std::vector<Var>{
                        {VarKind::L, from, to}, {VarKind::X, from, from}, {VarKind::Y, from, to}});
  }
}

TEST_CASE("message plan: the demo exchanges third-party factor rows") {
  const auto comm = mp::discover_comm_graph(demo6_topology(), PrimaryOrder::identity(6));
  const auto plan = mp::build_message_plan(comm);
  // updating L_64 needs L_43 from agent 4 and the S values pushed upward
  const auto& from4 = plan.outbound(3, 5);
  CHECK(std::find(from4.begin(), from4.end(), Var{VarKind::L, 3, 2}) != from4.end());
  CHECK(std::find(from4.begin(), from4.end(), Var{VarKind::S, 3, 3}) != from4.end());
  const auto& from3 = plan.outbound(2, 5);
  CHECK(std::find(from3.begin(), from3.end(), Var{VarKind::S, 2, 2}) != from3.end());
  // and agent 6 pushes its own row entries down for the y updates
  const auto& to4 = plan.outbound(5, 3);
  CHECK(std::find(to4.begin(), to4.end(), Var{VarKind::L, 5, 2}) != to4.end());
}

TEST_CASE("message plan covers every read on random graphs") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 12);
    const auto closed = oracle::random_closed_pattern(n, true, 500 + trial);
    mp::CommGraph comm{n, std::vector<std::vector<Index>>(static_cast<size_t>(n))};
    for (const auto& e : closed.entries()) {
      if (e.row == e.col) continue;
      comm.neighbors[static_cast<size_t>(e.row)].push_back(e.col);
      comm.neighbors[static_cast<size_t>(e.col)].push_back(e.row);
    }
    for (auto& nbrs : comm.neighbors) std::sort(nbrs.begin(), nbrs.end());
    const auto equations = mp::build_update_equations(closed, closed);
    const auto plan = mp::build_message_plan(comm);
    CHECK(mp::missing_plan_slots(equations, plan).empty());
  }
}

TEST_CASE("generated update equations match the hand-derived demo set") {
  const auto topo = demo6_topology();
  const auto a_pattern = pattern_from_graph(topo, PrimaryOrder::identity(6));
  const auto closed = symbolic_fill_in(a_pattern);
  const auto generated = mp::build_update_equations(a_pattern, closed);
  const auto expected = demo6::expected_equations();
  REQUIRE(generated.size() == expected.size());
  for (size_t agent = 0; agent < expected.size(); ++agent) {
    REQUIRE(generated[agent].size() == expected[agent].size());
    for (size_t k = 0; k < expected[agent].size(); ++k) {
      CAPTURE(agent);
      CAPTURE(k);
      CHECK(generated[agent][k] == expected[agent][k]);
    }
  }
}

TEST_CASE("a lone agent solves its scalar problem in one round") {
  SymmetricSparseMatrix a{SparsityPattern(1)};
  a.set(0, 0, 4.0);
  mp::Simulator sim(a, {2.0}, mp::CommGraph{1, {{}}});
  sim.synchronous_round();
  CHECK(sim.agent(0).x == 0.5);
  CHECK(sim.agent(0).y_diag == 0.25);
  CHECK(sim.synchronous_round() == 0.0);  // already at the fixed point
}

TEST_CASE("synchronous run on the demo: exact agreement within the bound") {
  auto [a, b] = demo6_problem(42);
  const auto reference = solve_global(a, b);
  const auto comm = comm_for(a);
  const int bound = mp::synchronous_round_bound(reference.factors.pattern);
  CHECK(bound == 40);  // 2 * (14 + 6)
  const auto result = mp::run_synchronous(a, b, comm, 2 * bound, &reference);
  CHECK(result.trace.converged);
  CHECK(result.first_exact_agreement_round > 0);
  CHECK(result.first_exact_agreement_round <= 30);
  CHECK(equal_solutions(result.final_values, reference, 0.0));  // bitwise
}

TEST_CASE("error norms drop to zero and stay there") {
  auto [a, b] = demo6_problem(7);
  const auto reference = solve_global(a, b);
  const auto result = mp::run_synchronous(a, b, comm_for(a), 200, &reference);
  bool s_locked = false, all_locked = false;
  for (const auto& row : result.trace.rows) {
    if (s_locked) CHECK(row.err.s <= 1e-13);
    if (row.err.s <= 1e-13) s_locked = true;
    if (all_locked) CHECK(row.err.max() <= 1e-13);
    if (row.err.max() <= 1e-13) all_locked = true;
  }
  CHECK(all_locked);
}

TEST_CASE("lock-in: variables change over a prefix of rounds only") {
  auto [a, b] = demo6_problem(11);
  const auto reference = solve_global(a, b);
  const auto result = mp::run_synchronous(a, b, comm_for(a), 200, &reference);
  // S_11 is right from initialization and w_1 locks after round one
  const auto& last = result.last_change_round;
  const auto s11 = last.find(Var{VarKind::S, 0, 0});
  CHECK((s11 == last.end() || s11->second == 0));
  // the factorization variables lock no later than their substitution depth
  const auto rows = reference.factors.pattern.row_lists();
  int position = 0;
  for (Index i = 0; i < 6; ++i) {
    for (Index j : rows[static_cast<size_t>(i)]) {
      ++position;
      const auto it = last.find(Var{VarKind::L, i, j});
      if (it != last.end()) CHECK(it->second <= position + 1);
    }
    ++position;
    const auto it = last.find(Var{VarKind::S, i, i});
    if (it != last.end()) CHECK(it->second <= position + 1);
  }
}

TEST_CASE("synchronous bound holds on random problems") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Index n = 2 + static_cast<Index>((seed * 13) % 29);
    const auto a = oracle::random_spd_matrix(n, seed % 2 == 0, seed);
    const auto b = oracle::random_vector(n, seed + 900);
    const auto reference = solve_global(a, b);
    const int bound = mp::synchronous_round_bound(reference.factors.pattern);
    const auto result = mp::run_synchronous(a, b, comm_for(a), 2 * bound + 10, &reference);
    CHECK(result.first_exact_agreement_round > 0);
    CHECK(result.first_exact_agreement_round <= bound);
  }
}

TEST_CASE("asynchronous runs land on the synchronous fixed point") {
  auto [a, b] = demo6_problem(42);
  const auto reference = solve_global(a, b);
  const auto comm = comm_for(a);
  const auto sync = mp::run_synchronous(a, b, comm, 200, &reference);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto async = mp::run_asynchronous(a, b, comm, seed, 6, 100000, &reference);
    CHECK(async.trace.converged);
    CHECK(equal_solutions(async.final_values, sync.final_values, 1e-12));
  }
}

TEST_CASE("asynchronous runs are deterministic for a fixed seed") {
  auto [a, b] = demo6_problem(3);
  const auto comm = comm_for(a);
  const auto r1 = mp::run_asynchronous(a, b, comm, 77, 9, 100000);
  const auto r2 = mp::run_asynchronous(a, b, comm, 77, 9, 100000);
  CHECK(r1.trace.rounds == r2.trace.rounds);
  CHECK(equal_solutions(r1.final_values, r2.final_values, 0.0));
}

TEST_CASE("async convergence across 100 seeds on a random problem") {
  const auto a = oracle::random_spd_matrix(10, true, 5);
  const auto b = oracle::random_vector(10, 6);
  const auto reference = solve_global(a, b);
  const auto comm = comm_for(a);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto result = mp::run_asynchronous(a, b, comm, seed, 10, 1000000, &reference);
    CHECK(equal_solutions(result.final_values, reference, 1e-12));
  }
}

TEST_CASE("convergence_error: zero against itself, positive at initialization") {
  auto [a, b] = demo6_problem(9);
  const auto reference = solve_global(a, b);
  CHECK(mp::convergence_error(reference, reference).max() == 0.0);
  const auto result = mp::run_synchronous(a, b, comm_for(a), 200, &reference);
  CHECK(result.trace.rows.front().err.max() > 0.0);
  CHECK(result.trace.rows.back().err.max() == 0.0);
}

TEST_CASE("messages follow the plan and are counted per round") {
  auto [a, b] = demo6_problem(4);
  const auto comm = comm_for(a);
  const auto plan = mp::build_message_plan(comm);
  std::vector<mp::Message> log;
  const auto result = mp::run_synchronous(a, b, comm, 200, nullptr,
                                          [&log](const mp::Message& m) { log.push_back(m); });
  CHECK(result.trace.rows.at(1).messages_sent == plan.total_slots());
  for (const auto& m : log) {
    const auto& slots = plan.outbound(m.from, m.to);
    CHECK(std::find(slots.begin(), slots.end(), m.slot) != slots.end());
    CHECK(mp::owner_of(m.slot) == m.from);
  }
}

TEST_CASE("simulator rejects inconsistent inputs") {
  auto [a, b] = demo6_problem(8);
  const auto comm = comm_for(a);
  // wrong communication graph: drop a required link
  mp::CommGraph broken = comm;
  broken.neighbors[5].pop_back();
  broken.neighbors[4].pop_back();
  CHECK_THROWS_AS(mp::Simulator(a, b, broken), std::invalid_argument);
  // wrong rhs length
  CHECK_THROWS_AS(mp::Simulator(a, {1.0}, comm), std::invalid_argument);
  // budget below the bound
  CHECK_THROWS_AS(mp::run_synchronous(a, b, comm, 5), std::invalid_argument);
  // unfair window
  CHECK_THROWS_AS(mp::run_asynchronous(a, b, comm, 1, 3, 1000), std::invalid_argument);
  // non-positive diagonal
  SymmetricSparseMatrix zero{SparsityPattern(2)};
  CHECK_THROWS_AS(mp::Simulator(zero, {1.0, 1.0}, mp::CommGraph{2, {{}, {}}}),
                  NotPositiveDefiniteError);
}

TEST_CASE("agent ordering modes") {
  const auto by_time = mp::order_from_join_times({3.5, 1.0, 2.0});
  CHECK(by_time.position(1) == 0);
  CHECK(by_time.position(2) == 1);
  CHECK(by_time.position(0) == 2);

  const auto negotiated = mp::order_from_random_integers(12, 99);
  const auto negotiated_again = mp::order_from_random_integers(12, 99);
  for (Index v = 0; v < 12; ++v) CHECK(negotiated.position(v) == negotiated_again.position(v));
}

TEST_CASE("variable names render 1-based") {
  CHECK(mp::to_string(Var{VarKind::L, 5, 3}) == "L_6_4");
  CHECK(mp::to_string(Var{VarKind::W, 1, 1}) == "w_2");
}
