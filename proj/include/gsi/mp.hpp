#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gsi/pattern.hpp"
#include "gsi/solver.hpp"
#include "gsi/sparse_matrix.hpp"
#include "gsi/types.hpp"

namespace gsi::mp {

/// Identifies one scalar of the factorization/solution. S, W, X carry only
/// i (j == i); L and Y carry (i, j) with j <= i. Every variable has exactly
/// one owning agent: agent i owns S_i, w_i, x_i, y_ii, and L_ij / y_ij for
/// its lower neighbors j.
enum class VarKind : std::uint8_t { S, L, W, X, Y };

struct Var {
  VarKind kind;
  Index i;
  Index j;

  friend auto operator<=>(const Var&, const Var&) = default;
};

std::string to_string(const Var& v);  // e.g. "L_6_4", 1-based

struct VarHash {
  size_t operator()(const Var& v) const {
    return (static_cast<size_t>(v.kind) << 40) ^ (static_cast<size_t>(v.i) << 20) ^
           static_cast<size_t>(v.j);
  }
};

/// Undirected communication links between agents. Closed under the rule
/// that two higher-numbered neighbors of a common agent must be linked, so
/// the link set equals the off-diagonal closed pattern.
struct CommGraph {
  Index n = 0;
  std::vector<std::vector<Index>> neighbors;  // sorted, per agent

  bool linked(Index a, Index b) const;
  /// Links as (max, min) pairs in basic order.
  std::vector<IndexPair> links() const;
  /// Lower-triangle pattern with the links as off-diagonal entries.
  SparsityPattern to_pattern() const;
};

/// Applies the two discovery rules recursively: shared factors create links,
/// and an agent with two higher-numbered neighbors tells them to link.
CommGraph discover_comm_graph(const FactorGraphTopology& graph, const PrimaryOrder& order);

/// One agent's storage/calculation responsibilities, in deterministic order
/// (S_i, w_i, x_i, y_ii, then L_ij / y_ij by ascending j).
std::vector<std::vector<Var>> assign_responsibilities(const CommGraph& comm);

Index owner_of(const Var& v);

/// Per directed link, the variables pushed along it each update.
struct MessagePlan {
  std::map<std::pair<Index, Index>, std::vector<Var>> slots;  // (from, to) -> vars

  const std::vector<Var>& outbound(Index from, Index to) const;
  std::int64_t total_slots() const;
};

/// Handshaking: for a link {lo, hi}: lo pushes S_lo, w_lo; hi pushes
/// L_hi,lo, y_hi,lo, x_hi; and for each mutually linked triple k < j < i,
/// i pushes L_ik to j and j pushes L_jk to i.
MessagePlan build_message_plan(const CommGraph& comm);

/// One owned variable's update, reduced to index sets. `first_terms` and
/// `second_terms` are the ascending summation index lists (the two sums of
/// the Y update; only `first_terms` for the others). `has_constant` records
/// whether the leading A_ij / b_i / 1/S_jj term is present.
struct UpdateEquation {
  Var target{};
  bool has_constant = false;
  std::vector<Index> first_terms;
  std::vector<Index> second_terms;

  friend bool operator==(const UpdateEquation&, const UpdateEquation&) = default;
};

/// Compiles every agent's update list from A's pattern and the closed
/// pattern. Sum ranges cover stored entries only.
std::vector<std::vector<UpdateEquation>> build_update_equations(const SparsityPattern& a_pattern,
                                                                const SparsityPattern& closed);

/// Variables an equation reads besides its target (duplicates removed).
std::vector<Var> equation_reads(const UpdateEquation& eq);

/// Checks that every non-owned read of every equation arrives via the plan.
/// Returns the missing (agent, variable) pairs; empty means sufficient.
std::vector<std::pair<Index, Var>> missing_plan_slots(
    const std::vector<std::vector<UpdateEquation>>& equations, const MessagePlan& plan);

struct Message {
  Index from = 0;
  Index to = 0;
  Var slot{};
  double value = 0.0;
  int round = 0;
};

struct AgentState {
  Index id = 0;
  double s = 0.0;
  double w = 0.0;
  double x = 0.0;
  double y_diag = 0.0;
  std::map<Index, double> l;  // j -> L_ij, lower neighbors
  std::map<Index, double> y;  // j -> y_ij
  std::unordered_map<Var, double, VarHash> mailbox;
};

struct ErrorNorms {
  double s = 0.0, l = 0.0, w = 0.0, x = 0.0, y = 0.0;

  double max() const;
};

/// Euclidean norms of the elementwise differences against a reference
/// global solution, per quantity (L and Y over the closed pattern).
ErrorNorms convergence_error(const GlobalSolution& snapshot, const GlobalSolution& reference);

struct TraceRow {
  int round = 0;
  ErrorNorms err;
  std::int64_t messages_sent = 0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  int rounds = 0;
};

/// Theorem bound 2(|L| + n) on synchronous rounds, |L| counted with the
/// diagonal included.
int synchronous_round_bound(const SparsityPattern& closed);

/// Lock-in drives every variable to an exactly unchanged round, which is
/// the primary termination test. Runs that keep drifting below this
/// absolute threshold without ever reaching exact zero stop after
/// kJitterPatience such rounds instead.
inline constexpr double kConvergenceEps = 1e-14;
inline constexpr int kJitterPatience = 8;

/// Deterministic in-process simulator. Agents own their variables; all
/// cross-agent reads go through mailboxes fed by the message plan.
class Simulator {
 public:
  /// comm must equal the closure of a's pattern (off-diagonals). Each agent
  /// is provisioned with its own row of A and entry of b.
  Simulator(const SymmetricSparseMatrix& a, std::vector<double> b, const CommGraph& comm);

  Index n() const { return static_cast<Index>(agents_.size()); }
  const AgentState& agent(Index i) const { return agents_[static_cast<size_t>(i)]; }
  const MessagePlan& plan() const { return plan_; }
  const std::vector<std::vector<UpdateEquation>>& equations() const { return equations_; }
  const SparsityPattern& closed_pattern() const { return closed_; }

  /// One synchronous round: every agent recomputes its owned variables from
  /// the previous-round snapshot, then all messages deliver. Returns the max
  /// absolute change across all variables.
  double synchronous_round();

  /// One asynchronous step: the given agent recomputes its owned variables
  /// from current values and its messages deliver immediately.
  double asynchronous_step(Index agent);

  /// Advances the round counter without updating anyone (asynchronous
  /// drivers call this once per fairness window).
  void advance_round() { ++round_; }

  int rounds_executed() const { return round_; }
  std::int64_t messages_sent() const { return messages_sent_; }

  /// Final/current values assembled into global-solver shapes.
  GlobalSolution collect() const;

  /// Last round in which each variable changed (0 = unchanged since
  /// initialization). Keyed in ownership order.
  const std::map<Var, int>& last_change_round() const { return last_change_; }

  void set_message_sink(std::function<void(const Message&)> sink) { sink_ = std::move(sink); }

 private:
  double run_equations(Index i, AgentState& st);
  void deliver(Index from, int round);
  double read(const AgentState& st, const Var& v) const;

  SparsityPattern a_pattern_;
  SparsityPattern closed_;
  std::vector<std::vector<Index>> rows_;        // closed pattern, per-row columns
  std::vector<std::map<Index, double>> a_lower_;  // per agent: j -> A_ij (0 at fill-in)
  std::vector<double> a_diag_;
  std::vector<double> b_;
  CommGraph comm_;
  MessagePlan plan_;
  std::vector<std::vector<UpdateEquation>> equations_;
  std::vector<AgentState> agents_;
  std::map<Var, int> last_change_;
  std::function<void(const Message&)> sink_;
  double pivot_floor_ = 0.0;
  int round_ = 0;
  std::int64_t messages_sent_ = 0;
};

struct RunResult {
  ConvergenceTrace trace;
  GlobalSolution final_values;
  std::map<Var, int> last_change_round;
  /// First round after which every variable equals the reference bitwise;
  /// -1 when no reference was given or agreement never happened.
  int first_exact_agreement_round = -1;
};

/// Jacobi-style synchronous schedule. Stops once a full round changes
/// nothing (or everything moves less than kConvergenceEps); throws
/// NonConvergenceError past max_rounds. max_rounds must be at least the
/// Theorem bound 2(|L| + n).
RunResult run_synchronous(const SymmetricSparseMatrix& a, const std::vector<double>& b,
                          const CommGraph& comm, int max_rounds,
                          const GlobalSolution* reference = nullptr,
                          std::function<void(const Message&)> sink = nullptr);

/// Fair asynchronous schedule: windows of `fairness_window` single-agent
/// updates, each window a seeded random permutation of all agents plus
/// uniform extra picks. Deterministic for a fixed seed. Trace rows are per
/// window.
RunResult run_asynchronous(const SymmetricSparseMatrix& a, const std::vector<double>& b,
                           const CommGraph& comm, std::uint64_t schedule_seed,
                           Index fairness_window, std::int64_t max_updates,
                           const GlobalSolution* reference = nullptr,
                           std::function<void(const Message&)> sink = nullptr);

/// Agent-order negotiation (the simulator's three modes).
PrimaryOrder order_from_join_times(const std::vector<double>& join_times);
PrimaryOrder order_from_random_integers(Index n, std::uint64_t seed);

}  // namespace gsi::mp
