#include "gsi/pattern.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace gsi {

SparsityPattern::SparsityPattern(Index n) : n_(n) {
  if (n < 1) throw std::invalid_argument("pattern dimension must be positive");
  cols_.resize(static_cast<size_t>(n));
  for (Index j = 0; j < n; ++j) cols_[static_cast<size_t>(j)].push_back(j);
}

void SparsityPattern::insert(Index i, Index j) {
  if (j > i || i < 0 || i >= n_)
    throw std::invalid_argument("pattern entry " + to_string_1based({i, j}) +
                                " outside the lower triangle");
  auto& rows = cols_[static_cast<size_t>(j)];
  auto it = std::lower_bound(rows.begin(), rows.end(), i);
  if (it == rows.end() || *it != i) rows.insert(it, i);
}

bool SparsityPattern::contains(Index i, Index j) const {
  if (j > i || j < 0 || i >= n_) return false;
  const auto& rows = cols_[static_cast<size_t>(j)];
  return std::binary_search(rows.begin(), rows.end(), i);
}

std::vector<std::vector<Index>> SparsityPattern::row_lists() const {
  std::vector<std::vector<Index>> rows(static_cast<size_t>(n_));
  for (Index j = 0; j < n_; ++j)
    for (Index i : cols_[static_cast<size_t>(j)])
      if (i > j) rows[static_cast<size_t>(i)].push_back(j);
  // columns were scanned ascending, so each row list is already sorted
  return rows;
}

std::vector<IndexPair> SparsityPattern::entries() const {
  std::vector<IndexPair> out;
  out.reserve(static_cast<size_t>(size()));
  auto rows = row_lists();
  for (Index i = 0; i < n_; ++i) {
    for (Index j : rows[static_cast<size_t>(i)]) out.push_back({i, j});
    out.push_back({i, i});
  }
  return out;
}

std::int64_t SparsityPattern::size() const {
  std::int64_t total = 0;
  for (const auto& rows : cols_) total += static_cast<std::int64_t>(rows.size());
  return total;
}

bool SparsityPattern::is_closed() const {
  for (Index j = 0; j < n_; ++j) {
    const auto& rows = cols_[static_cast<size_t>(j)];
    for (size_t a = 0; a < rows.size(); ++a) {
      if (rows[a] == j) continue;
      for (size_t b = a + 1; b < rows.size(); ++b)
        if (!contains(rows[b], rows[a])) return false;
    }
  }
  return true;
}

PrimaryOrder::PrimaryOrder(std::vector<Index> position_of_label)
    : pos_of_label_(std::move(position_of_label)) {
  const Index n = static_cast<Index>(pos_of_label_.size());
  if (n < 1) throw std::invalid_argument("order must cover at least one variable");
  label_of_pos_.assign(static_cast<size_t>(n), -1);
  for (Index label = 0; label < n; ++label) {
    Index pos = pos_of_label_[static_cast<size_t>(label)];
    if (pos < 0 || pos >= n || label_of_pos_[static_cast<size_t>(pos)] != -1)
      throw std::invalid_argument("order is not a permutation of 0..n-1");
    label_of_pos_[static_cast<size_t>(pos)] = label;
  }
}

PrimaryOrder PrimaryOrder::identity(Index n) {
  std::vector<Index> pos(static_cast<size_t>(n));
  std::iota(pos.begin(), pos.end(), 0);
  return PrimaryOrder(std::move(pos));
}

void FactorGraphTopology::validate() const {
  if (n_variables < 1) throw std::invalid_argument("graph needs at least one variable");
  for (const auto& scope : factors) {
    if (scope.empty()) throw std::invalid_argument("factor scope is empty");
    for (Index v : scope)
      if (v < 0 || v >= n_variables)
        throw std::invalid_argument("factor scope names unknown variable " +
                                    std::to_string(v + 1));
  }
}

SparsityPattern pattern_from_graph(const FactorGraphTopology& graph, const PrimaryOrder& order) {
  graph.validate();
  if (order.n() != graph.n_variables)
    throw std::invalid_argument("order does not cover all graph variables");
  SparsityPattern pattern(graph.n_variables);
  for (const auto& scope : graph.factors) {
    for (size_t a = 0; a < scope.size(); ++a) {
      for (size_t b = a + 1; b < scope.size(); ++b) {
        Index p = order.position(scope[a]);
        Index q = order.position(scope[b]);
        if (p == q) continue;
        pattern.insert(std::max(p, q), std::min(p, q));
      }
    }
  }
  return pattern;
}

SparsityPattern symbolic_fill_in(const SparsityPattern& pattern) {
  SparsityPattern closed = pattern;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Index j = 0; j < closed.n(); ++j) {
      // copy: the inner inserts touch other columns only (rows[a] > j), but
      // keep the scan stable against reallocation anyway
      std::vector<Index> rows = closed.column(j);
      for (size_t a = 0; a < rows.size(); ++a) {
        if (rows[a] == j) continue;
        for (size_t b = a + 1; b < rows.size(); ++b) {
          if (!closed.contains(rows[b], rows[a])) {
            closed.insert(rows[b], rows[a]);
            changed = true;
          }
        }
      }
    }
  }
  return closed;
}

namespace {

std::vector<std::vector<Index>> variable_adjacency(const FactorGraphTopology& graph) {
  std::vector<std::vector<Index>> adj(static_cast<size_t>(graph.n_variables));
  for (const auto& scope : graph.factors) {
    for (size_t a = 0; a < scope.size(); ++a)
      for (size_t b = a + 1; b < scope.size(); ++b) {
        if (scope[a] == scope[b]) continue;
        adj[static_cast<size_t>(scope[a])].push_back(scope[b]);
        adj[static_cast<size_t>(scope[b])].push_back(scope[a]);
      }
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

}  // namespace

PrimaryOrder spanning_tree_order(const FactorGraphTopology& graph) {
  graph.validate();
  const Index n = graph.n_variables;
  auto adj = variable_adjacency(graph);

  // DFS postorder per component: children are emitted before their parent,
  // so every variable has at most one later neighbor in the spanning tree
  std::vector<Index> pos(static_cast<size_t>(n), -1);
  Index next = 0;
  std::vector<char> visited(static_cast<size_t>(n), 0);
  for (Index root = 0; root < n; ++root) {
    if (visited[static_cast<size_t>(root)]) continue;
    struct Frame {
      Index v;
      size_t child = 0;
    };
    std::vector<Frame> stack{{root}};
    visited[static_cast<size_t>(root)] = 1;
    while (!stack.empty()) {
      Frame& top = stack.back();
      const auto& nbrs = adj[static_cast<size_t>(top.v)];
      if (top.child < nbrs.size()) {
        Index c = nbrs[top.child++];
        if (!visited[static_cast<size_t>(c)]) {
          visited[static_cast<size_t>(c)] = 1;
          stack.push_back({c});
        }
      } else {
        pos[static_cast<size_t>(top.v)] = next++;
        stack.pop_back();
      }
    }
  }
  return PrimaryOrder(std::move(pos));
}

PrimaryOrder random_order(Index n, std::uint64_t seed) {
  std::vector<Index> pos(static_cast<size_t>(n));
  std::iota(pos.begin(), pos.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates, pinned here so orders stay stable across toolchains
  for (size_t k = pos.size(); k > 1; --k) {
    size_t r = static_cast<size_t>(rng() % k);
    std::swap(pos[k - 1], pos[r]);
  }
  return PrimaryOrder(std::move(pos));
}

void write_pattern(std::ostream& out, const SparsityPattern& pattern) {
  out << "N " << pattern.n() << "\n";
  for (const auto& e : pattern.entries()) out << e.row + 1 << " " << e.col + 1 << "\n";
}

SparsityPattern read_pattern(std::istream& in) {
  std::string tag;
  Index n = 0;
  if (!(in >> tag >> n) || tag != "N" || n < 1)
    throw std::invalid_argument("pattern file must start with 'N <n>'");
  SparsityPattern pattern(n);
  Index i = 0, j = 0;
  while (in >> i >> j) {
    if (i < 1 || i > n || j < 1 || j > i)
      throw std::invalid_argument("pattern entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") out of range");
    pattern.insert(i - 1, j - 1);
  }
  return pattern;
}

}  // namespace gsi
