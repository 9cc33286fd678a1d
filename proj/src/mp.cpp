#include "gsi/mp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>

namespace gsi::mp {

std::string to_string(const Var& v) {
  const char* k = nullptr;
  switch (v.kind) {
    case VarKind::S: k = "S"; break;
    case VarKind::L: k = "L"; break;
    case VarKind::W: k = "w"; break;
    case VarKind::X: k = "x"; break;
    case VarKind::Y: k = "y"; break;
  }
  std::string out = std::string(k) + "_" + std::to_string(v.i + 1);
  if (v.kind == VarKind::L || v.kind == VarKind::Y) out += "_" + std::to_string(v.j + 1);
  return out;
}

bool CommGraph::linked(Index a, Index b) const {
  if (a == b) return false;
  const auto& nbrs = neighbors[static_cast<size_t>(a)];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<IndexPair> CommGraph::links() const {
  std::vector<IndexPair> out;
  for (Index i = 0; i < n; ++i)
    for (Index j : neighbors[static_cast<size_t>(i)])
      if (j < i) out.push_back({i, j});
  std::sort(out.begin(), out.end());
  return out;
}

SparsityPattern CommGraph::to_pattern() const {
  SparsityPattern p(n);
  for (const auto& link : links()) p.insert(link.row, link.col);
  return p;
}

CommGraph discover_comm_graph(const FactorGraphTopology& graph, const PrimaryOrder& order) {
  graph.validate();
  if (order.n() != graph.n_variables)
    throw std::invalid_argument("order does not cover all graph variables");
  const Index n = graph.n_variables;
  std::vector<std::vector<char>> adj(static_cast<size_t>(n),
                                     std::vector<char>(static_cast<size_t>(n), 0));
  // rule 1: agents sharing a factor link up
  for (const auto& scope : graph.factors)
    for (size_t a = 0; a < scope.size(); ++a)
      for (size_t b = a + 1; b < scope.size(); ++b) {
        Index p = order.position(scope[a]);
        Index q = order.position(scope[b]);
        if (p == q) continue;
        adj[static_cast<size_t>(p)][static_cast<size_t>(q)] = 1;
        adj[static_cast<size_t>(q)][static_cast<size_t>(p)] = 1;
      }
  // rule 2, applied recursively: an agent with two higher-numbered
  // neighbors tells them to link
  bool changed = true;
  while (changed) {
    changed = false;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        if (!adj[static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
        for (Index k = j + 1; k < n; ++k) {
          if (!adj[static_cast<size_t>(i)][static_cast<size_t>(k)]) continue;
          if (!adj[static_cast<size_t>(j)][static_cast<size_t>(k)]) {
            adj[static_cast<size_t>(j)][static_cast<size_t>(k)] = 1;
            adj[static_cast<size_t>(k)][static_cast<size_t>(j)] = 1;
            changed = true;
          }
        }
      }
  }
  CommGraph comm{n, std::vector<std::vector<Index>>(static_cast<size_t>(n))};
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (adj[static_cast<size_t>(i)][static_cast<size_t>(j)])
        comm.neighbors[static_cast<size_t>(i)].push_back(j);
  return comm;
}

std::vector<std::vector<Var>> assign_responsibilities(const CommGraph& comm) {
  std::vector<std::vector<Var>> owned(static_cast<size_t>(comm.n));
  for (Index i = 0; i < comm.n; ++i) {
    auto& list = owned[static_cast<size_t>(i)];
    list.push_back({VarKind::S, i, i});
    list.push_back({VarKind::W, i, i});
    list.push_back({VarKind::X, i, i});
    list.push_back({VarKind::Y, i, i});
    for (Index j : comm.neighbors[static_cast<size_t>(i)]) {
      if (j >= i) break;
      list.push_back({VarKind::L, i, j});
      list.push_back({VarKind::Y, i, j});
    }
  }
  return owned;
}

Index owner_of(const Var& v) { return v.i; }

const std::vector<Var>& MessagePlan::outbound(Index from, Index to) const {
  static const std::vector<Var> empty;
  auto it = slots.find({from, to});
  return it == slots.end() ? empty : it->second;
}

std::int64_t MessagePlan::total_slots() const {
  std::int64_t total = 0;
  for (const auto& [_, vars] : slots) total += static_cast<std::int64_t>(vars.size());
  return total;
}

MessagePlan build_message_plan(const CommGraph& comm) {
  MessagePlan plan;
  for (Index i = 0; i < comm.n; ++i) {
    const auto& nbrs = comm.neighbors[static_cast<size_t>(i)];
    for (Index j : nbrs) {
      if (j > i) {
        // rule 1: push S_ii and w_i up
        plan.slots[{i, j}].push_back({VarKind::S, i, i});
        plan.slots[{i, j}].push_back({VarKind::W, i, i});
      } else {
        // rule 2: push L_ij, y_ij, x_i down
        plan.slots[{i, j}].push_back({VarKind::L, i, j});
        plan.slots[{i, j}].push_back({VarKind::Y, i, j});
        plan.slots[{i, j}].push_back({VarKind::X, i, i});
        // rule 3: for mutually linked k < j, exchange third-party L rows
        for (Index k : nbrs) {
          if (k >= j) break;
          if (!comm.linked(j, k)) continue;
          plan.slots[{i, j}].push_back({VarKind::L, i, k});
          plan.slots[{j, i}].push_back({VarKind::L, j, k});
        }
      }
    }
  }
  for (auto& [_, vars] : plan.slots) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  }
  return plan;
}

std::vector<std::vector<UpdateEquation>> build_update_equations(const SparsityPattern& a_pattern,
                                                                const SparsityPattern& closed) {
  if (a_pattern.n() != closed.n())
    throw std::invalid_argument("pattern dimension mismatch");
  const Index n = closed.n();
  const auto rows = closed.row_lists();
  std::vector<std::vector<UpdateEquation>> eqs(static_cast<size_t>(n));

  for (Index i = 0; i < n; ++i) {
    auto& list = eqs[static_cast<size_t>(i)];
    const auto& row_i = rows[static_cast<size_t>(i)];

    UpdateEquation s_eq{{VarKind::S, i, i}, true, row_i, {}};
    list.push_back(std::move(s_eq));

    // L_ij, descending j as in the per-agent listings
    for (auto it = row_i.rbegin(); it != row_i.rend(); ++it) {
      const Index j = *it;
      UpdateEquation eq{{VarKind::L, i, j}, a_pattern.contains(i, j), {}, {}};
      const auto& row_j = rows[static_cast<size_t>(j)];
      // ascending intersection of rows j and i below column j
      size_t p = 0, q = 0;
      while (p < row_j.size() && q < row_i.size()) {
        if (row_j[p] == row_i[q]) {
          eq.first_terms.push_back(row_j[p]);
          ++p, ++q;
        } else if (row_j[p] < row_i[q]) {
          ++p;
        } else {
          ++q;
        }
      }
      list.push_back(std::move(eq));
    }

    UpdateEquation w_eq{{VarKind::W, i, i}, true, row_i, {}};
    list.push_back(std::move(w_eq));

    UpdateEquation x_eq{{VarKind::X, i, i}, true, {}, {}};
    for (Index k : closed.column(i))
      if (k > i) x_eq.first_terms.push_back(k);
    list.push_back(std::move(x_eq));

    // y_ii first, then y_ij descending j: the backward pass through the row
    {
      UpdateEquation eq{{VarKind::Y, i, i}, true, {}, {}};
      for (Index k : closed.column(i))
        if (k > i) eq.second_terms.push_back(k);
      list.push_back(std::move(eq));
    }
    for (auto it = row_i.rbegin(); it != row_i.rend(); ++it) {
      const Index j = *it;
      UpdateEquation eq{{VarKind::Y, i, j}, false, {}, {}};
      for (Index l : closed.column(j)) {
        if (l <= j) continue;
        if (l <= i)
          eq.first_terms.push_back(l);
        else
          eq.second_terms.push_back(l);
      }
      list.push_back(std::move(eq));
    }
  }
  return eqs;
}

std::vector<Var> equation_reads(const UpdateEquation& eq) {
  std::vector<Var> reads;
  const Index i = eq.target.i;
  const Index j = eq.target.j;
  switch (eq.target.kind) {
    case VarKind::S:
      for (Index l : eq.first_terms) {
        reads.push_back({VarKind::L, i, l});
        reads.push_back({VarKind::S, l, l});
      }
      break;
    case VarKind::L:
      reads.push_back({VarKind::S, j, j});
      for (Index l : eq.first_terms) {
        reads.push_back({VarKind::L, j, l});
        reads.push_back({VarKind::L, i, l});
        reads.push_back({VarKind::S, l, l});
      }
      break;
    case VarKind::W:
      reads.push_back({VarKind::S, i, i});
      for (Index l : eq.first_terms) {
        reads.push_back({VarKind::L, i, l});
        reads.push_back({VarKind::S, l, l});
        reads.push_back({VarKind::W, l, l});
      }
      break;
    case VarKind::X:
      reads.push_back({VarKind::W, i, i});
      for (Index k : eq.first_terms) {
        reads.push_back({VarKind::L, k, i});
        reads.push_back({VarKind::X, k, k});
      }
      break;
    case VarKind::Y:
      if (i == j) reads.push_back({VarKind::S, i, i});
      for (Index l : eq.first_terms) {
        reads.push_back({VarKind::L, l, j});
        reads.push_back({VarKind::Y, i, l});
      }
      for (Index k : eq.second_terms) {
        reads.push_back({VarKind::L, k, j});
        reads.push_back({VarKind::Y, k, i});
      }
      break;
  }
  std::sort(reads.begin(), reads.end());
  reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
  return reads;
}

std::vector<std::pair<Index, Var>> missing_plan_slots(
    const std::vector<std::vector<UpdateEquation>>& equations, const MessagePlan& plan) {
  std::vector<std::pair<Index, Var>> missing;
  for (Index i = 0; i < static_cast<Index>(equations.size()); ++i) {
    std::vector<Var> inbound;
    for (const auto& [edge, vars] : plan.slots)
      if (edge.second == i) inbound.insert(inbound.end(), vars.begin(), vars.end());
    std::sort(inbound.begin(), inbound.end());
    for (const auto& eq : equations[static_cast<size_t>(i)]) {
      for (const auto& v : equation_reads(eq)) {
        if (owner_of(v) == i) continue;
        if (!std::binary_search(inbound.begin(), inbound.end(), v)) missing.push_back({i, v});
      }
    }
  }
  return missing;
}

double ErrorNorms::max() const {
  return std::max({s, l, w, x, y});
}

namespace {

double norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double norm_diff_nested(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b) {
  double acc = 0.0;
  for (size_t r = 0; r < a.size(); ++r) {
    assert(a[r].size() == b[r].size());
    for (size_t t = 0; t < a[r].size(); ++t) {
      const double d = a[r][t] - b[r][t];
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

ErrorNorms convergence_error(const GlobalSolution& snapshot, const GlobalSolution& reference) {
  if (snapshot.factors.pattern != reference.factors.pattern)
    throw std::invalid_argument("snapshot and reference patterns differ");
  ErrorNorms e;
  e.s = norm_diff(snapshot.factors.s, reference.factors.s);
  e.l = norm_diff_nested(snapshot.factors.l, reference.factors.l);
  e.w = norm_diff(snapshot.solution.w, reference.solution.w);
  e.x = norm_diff(snapshot.solution.x, reference.solution.x);
  const double y_off = norm_diff_nested(snapshot.selinv.y, reference.selinv.y);
  const double y_diag = norm_diff(snapshot.selinv.y_diag, reference.selinv.y_diag);
  e.y = std::sqrt(y_off * y_off + y_diag * y_diag);
  return e;
}

int synchronous_round_bound(const SparsityPattern& closed) {
  return static_cast<int>(2 * (closed.size() + closed.n()));
}

Simulator::Simulator(const SymmetricSparseMatrix& a, std::vector<double> b, const CommGraph& comm)
    : a_pattern_(a.pattern()),
      closed_(symbolic_fill_in(a.pattern())),
      b_(std::move(b)),
      comm_(comm) {
  const Index n = a.n();
  if (static_cast<Index>(b_.size()) != n)
    throw std::invalid_argument("right-hand side has length " + std::to_string(b_.size()) +
                                ", expected " + std::to_string(n));
  if (comm_.n != n || comm_.to_pattern() != closed_)
    throw std::invalid_argument("communication graph does not match the closed pattern of A");

  rows_ = closed_.row_lists();
  plan_ = build_message_plan(comm_);
  equations_ = build_update_equations(a_pattern_, closed_);
  assert(missing_plan_slots(equations_, plan_).empty());

  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a.value_or_zero(i, i)));
  pivot_floor_ = kPivotRelTol * max_diag;

  a_lower_.resize(static_cast<size_t>(n));
  a_diag_.resize(static_cast<size_t>(n));
  agents_.resize(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double a_ii = a.value_or_zero(i, i);
    if (!(a_ii > pivot_floor_)) throw NotPositiveDefiniteError(i, a_ii);
    a_diag_[static_cast<size_t>(i)] = a_ii;
    auto& st = agents_[static_cast<size_t>(i)];
    st.id = i;
    st.s = a_ii;
    st.w = b_[static_cast<size_t>(i)];
    st.x = b_[static_cast<size_t>(i)];
    st.y_diag = 1.0 / a_ii;
    for (Index j : rows_[static_cast<size_t>(i)]) {
      st.l[j] = 0.0;
      st.y[j] = 0.0;
      a_lower_[static_cast<size_t>(i)][j] = a.value_or_zero(i, j);  // zero at fill-in
    }
  }
  // mailboxes start from the shared initialization rule
  for (const auto& [edge, vars] : plan_.slots)
    for (const auto& v : vars)
      agents_[static_cast<size_t>(edge.second)].mailbox[v] =
          read(agents_[static_cast<size_t>(edge.first)], v);
}

double Simulator::read(const AgentState& st, const Var& v) const {
  switch (v.kind) {
    case VarKind::S: return st.s;
    case VarKind::W: return st.w;
    case VarKind::X: return st.x;
    case VarKind::Y: return v.i == v.j ? st.y_diag : st.y.at(v.j);
    case VarKind::L: return st.l.at(v.j);
  }
  return 0.0;  // unreachable
}

double Simulator::run_equations(Index i, AgentState& st) {
  // st is updated in place, equation by equation: own variables read fresh
  // values once recomputed, everything remote comes from the mailbox
  const auto mb = [&st](VarKind kind, Index vi, Index vj) {
    return st.mailbox.at({kind, vi, vj});
  };
  const auto check_pivot = [this](Index idx, double s) {
    if (!(std::abs(s) > pivot_floor_)) throw NotPositiveDefiniteError(idx, s);
  };

  double max_change = 0.0;
  for (const auto& eq : equations_[static_cast<size_t>(i)]) {
    double fresh = 0.0;
    switch (eq.target.kind) {
      case VarKind::S: {
        double acc = a_diag_[static_cast<size_t>(i)];
        for (size_t t = 0; t < eq.first_terms.size(); ++t) {
          const Index l = eq.first_terms[t];
          const double lv = st.l.at(l);
          acc -= lv * lv * mb(VarKind::S, l, l);
        }
        fresh = acc;
        max_change = std::max(max_change, std::abs(fresh - st.s));
        if (fresh != st.s) last_change_[eq.target] = round_;
        st.s = fresh;
        break;
      }
      case VarKind::L: {
        const Index j = eq.target.j;
        double acc = a_lower_[static_cast<size_t>(i)].at(j);
        for (Index l : eq.first_terms)
          acc -= mb(VarKind::L, j, l) * st.l.at(l) * mb(VarKind::S, l, l);
        const double s_jj = mb(VarKind::S, j, j);
        check_pivot(j, s_jj);
        fresh = acc / s_jj;
        auto& slot = st.l.at(j);
        max_change = std::max(max_change, std::abs(fresh - slot));
        if (fresh != slot) last_change_[eq.target] = round_;
        slot = fresh;
        break;
      }
      case VarKind::W: {
        double acc = b_[static_cast<size_t>(i)];
        for (Index j : eq.first_terms)
          acc -= st.l.at(j) * mb(VarKind::S, j, j) * mb(VarKind::W, j, j);
        check_pivot(i, st.s);
        fresh = acc / st.s;
        max_change = std::max(max_change, std::abs(fresh - st.w));
        if (fresh != st.w) last_change_[eq.target] = round_;
        st.w = fresh;
        break;
      }
      case VarKind::X: {
        double acc = st.w;
        for (Index k : eq.first_terms)
          acc -= mb(VarKind::L, k, i) * mb(VarKind::X, k, k);
        fresh = acc;
        max_change = std::max(max_change, std::abs(fresh - st.x));
        if (fresh != st.x) last_change_[eq.target] = round_;
        st.x = fresh;
        break;
      }
      case VarKind::Y: {
        const Index j = eq.target.j;
        double acc = 0.0;
        if (eq.has_constant) {
          check_pivot(i, st.s);
          acc = 1.0 / st.s;
        }
        for (Index l : eq.first_terms) {
          const double l_lj = (l == i) ? st.l.at(j) : mb(VarKind::L, l, j);
          const double y_il = (l == i) ? st.y_diag : st.y.at(l);
          acc -= l_lj * y_il;
        }
        for (Index k : eq.second_terms)
          acc -= mb(VarKind::L, k, j) * mb(VarKind::Y, k, i);
        fresh = acc;
        double& slot = (i == j) ? st.y_diag : st.y.at(j);
        max_change = std::max(max_change, std::abs(fresh - slot));
        if (fresh != slot) last_change_[eq.target] = round_;
        slot = fresh;
        break;
      }
    }
  }
  return max_change;
}

void Simulator::deliver(Index from, int round) {
  const auto& st = agents_[static_cast<size_t>(from)];
  for (Index to : comm_.neighbors[static_cast<size_t>(from)]) {
    for (const auto& v : plan_.outbound(from, to)) {
      const double value = read(st, v);
      agents_[static_cast<size_t>(to)].mailbox[v] = value;
      ++messages_sent_;
      if (sink_) sink_({from, to, v, value, round});
    }
  }
}

double Simulator::synchronous_round() {
  ++round_;
  // mailboxes stay frozen while every agent updates, then all messages go
  // out together: cross-agent reads always see the previous round
  double max_change = 0.0;
  for (Index i = 0; i < n(); ++i)
    max_change = std::max(max_change, run_equations(i, agents_[static_cast<size_t>(i)]));
  for (Index i = 0; i < n(); ++i) deliver(i, round_);
  return max_change;
}

double Simulator::asynchronous_step(Index agent) {
  const double change = run_equations(agent, agents_[static_cast<size_t>(agent)]);
  deliver(agent, round_);
  return change;
}

GlobalSolution Simulator::collect() const {
  const Index nn = n();
  LdlFactors f{closed_, rows_, {}, {}};
  f.l.resize(static_cast<size_t>(nn));
  f.s.resize(static_cast<size_t>(nn));
  SelectedInverse si{closed_, f.rows, {}, {}};
  si.y.resize(static_cast<size_t>(nn));
  si.y_diag.resize(static_cast<size_t>(nn));
  Solution sol;
  sol.w.resize(static_cast<size_t>(nn));
  sol.x.resize(static_cast<size_t>(nn));
  for (Index i = 0; i < nn; ++i) {
    const auto& st = agents_[static_cast<size_t>(i)];
    f.s[static_cast<size_t>(i)] = st.s;
    sol.w[static_cast<size_t>(i)] = st.w;
    sol.x[static_cast<size_t>(i)] = st.x;
    si.y_diag[static_cast<size_t>(i)] = st.y_diag;
    for (Index j : f.rows[static_cast<size_t>(i)]) {
      f.l[static_cast<size_t>(i)].push_back(st.l.at(j));
      si.y[static_cast<size_t>(i)].push_back(st.y.at(j));
    }
  }
  return {std::move(f), std::move(sol), std::move(si)};
}

namespace {

bool equals_reference(const GlobalSolution& a, const GlobalSolution& b) {
  return a.factors.s == b.factors.s && a.factors.l == b.factors.l &&
         a.solution.w == b.solution.w && a.solution.x == b.solution.x &&
         a.selinv.y == b.selinv.y && a.selinv.y_diag == b.selinv.y_diag;
}

void record_round(ConvergenceTrace& trace, int& first_agreement, int round, const Simulator& sim,
                  const GlobalSolution* reference, std::int64_t messages) {
  TraceRow row;
  row.round = round;
  row.messages_sent = messages;
  if (reference) {
    const GlobalSolution snapshot = sim.collect();
    row.err = convergence_error(snapshot, *reference);
    if (first_agreement < 0 && equals_reference(snapshot, *reference)) first_agreement = round;
  }
  trace.rows.push_back(row);
}

}  // namespace

RunResult run_synchronous(const SymmetricSparseMatrix& a, const std::vector<double>& b,
                          const CommGraph& comm, int max_rounds, const GlobalSolution* reference,
                          std::function<void(const Message&)> sink) {
  Simulator sim(a, b, comm);
  const int bound = synchronous_round_bound(sim.closed_pattern());
  if (max_rounds < bound)
    throw std::invalid_argument("max_rounds " + std::to_string(max_rounds) +
                                " is below the synchronous bound " + std::to_string(bound));
  if (sink) sim.set_message_sink(std::move(sink));

  ConvergenceTrace trace;
  int first_agreement = -1;
  record_round(trace, first_agreement, 0, sim, reference, 0);
  std::int64_t sent_before = 0;
  int quiet_rounds = 0;  // consecutive rounds below the jitter fallback
  for (int round = 1; round <= max_rounds; ++round) {
    const double change = sim.synchronous_round();
    const std::int64_t sent = sim.messages_sent() - sent_before;
    sent_before = sim.messages_sent();
    record_round(trace, first_agreement, round, sim, reference, sent);
    quiet_rounds = change <= kConvergenceEps ? quiet_rounds + 1 : 0;
    // lock-in produces an exactly unchanged round; the epsilon path only
    // ends runs that jitter below it without ever reaching exact zero
    if (change == 0.0 || quiet_rounds >= kJitterPatience) {
      trace.converged = true;
      trace.rounds = round;
      break;
    }
  }
  if (!trace.converged)
    throw NonConvergenceError(max_rounds, "synchronous run still changing at the round budget");
  return {std::move(trace), sim.collect(), sim.last_change_round(), first_agreement};
}

RunResult run_asynchronous(const SymmetricSparseMatrix& a, const std::vector<double>& b,
                           const CommGraph& comm, std::uint64_t schedule_seed,
                           Index fairness_window, std::int64_t max_updates,
                           const GlobalSolution* reference,
                           std::function<void(const Message&)> sink) {
  Simulator sim(a, b, comm);
  const Index n = sim.n();
  if (fairness_window < n)
    throw std::invalid_argument("fairness window must cover every agent at least once");
  if (sink) sim.set_message_sink(std::move(sink));

  std::mt19937_64 rng(schedule_seed);
  ConvergenceTrace trace;
  int first_agreement = -1;
  record_round(trace, first_agreement, 0, sim, reference, 0);
  std::int64_t updates = 0;
  std::int64_t sent_before = 0;
  int window_index = 0;
  int quiet_windows = 0;

  std::vector<Index> agents(static_cast<size_t>(n));
  while (updates < max_updates) {
    ++window_index;
    sim.advance_round();
    // permutation first (fairness), then uniform extra picks
    for (Index i = 0; i < n; ++i) agents[static_cast<size_t>(i)] = i;
    for (size_t k = agents.size(); k > 1; --k)
      std::swap(agents[k - 1], agents[static_cast<size_t>(rng() % k)]);
    std::vector<Index> schedule = agents;
    for (Index extra = n; extra < fairness_window; ++extra)
      schedule.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)));

    double window_change = 0.0;
    for (Index agent : schedule) {
      window_change = std::max(window_change, sim.asynchronous_step(agent));
      ++updates;
    }
    const std::int64_t sent = sim.messages_sent() - sent_before;
    sent_before = sim.messages_sent();
    record_round(trace, first_agreement, window_index, sim, reference, sent);
    quiet_windows = window_change <= kConvergenceEps ? quiet_windows + 1 : 0;
    if (window_change == 0.0 || quiet_windows >= kJitterPatience) {
      trace.converged = true;
      trace.rounds = window_index;
      break;
    }
  }
  if (!trace.converged)
    throw NonConvergenceError(window_index, "asynchronous run still changing at the update budget");
  return {std::move(trace), sim.collect(), sim.last_change_round(), first_agreement};
}

PrimaryOrder order_from_join_times(const std::vector<double>& join_times) {
  const Index n = static_cast<Index>(join_times.size());
  std::vector<Index> labels(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = i;
  std::stable_sort(labels.begin(), labels.end(), [&](Index a, Index b) {
    return join_times[static_cast<size_t>(a)] < join_times[static_cast<size_t>(b)];
  });
  std::vector<Index> pos(static_cast<size_t>(n));
  for (Index p = 0; p < n; ++p) pos[static_cast<size_t>(labels[static_cast<size_t>(p)])] = p;
  return PrimaryOrder(std::move(pos));
}

PrimaryOrder order_from_random_integers(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> draws(static_cast<size_t>(n));
  // every agent self-generates a large integer; collisions force a redraw
  bool collision = true;
  while (collision) {
    collision = false;
    for (auto& d : draws) d = rng();
    std::vector<std::uint64_t> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    for (size_t k = 1; k < sorted.size(); ++k)
      if (sorted[k] == sorted[k - 1]) collision = true;
  }
  std::vector<Index> labels(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = i;
  std::sort(labels.begin(), labels.end(),
            [&](Index a, Index b) { return draws[static_cast<size_t>(a)] < draws[static_cast<size_t>(b)]; });
  std::vector<Index> pos(static_cast<size_t>(n));
  for (Index p = 0; p < n; ++p) pos[static_cast<size_t>(labels[static_cast<size_t>(p)])] = p;
  return PrimaryOrder(std::move(pos));
}

}  // namespace gsi::mp
