#include "gsi/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace gsi {

void GaussianFactor::validate(Index n_variables) const {
  const auto dim = static_cast<Eigen::Index>(scope.size());
  if (scope.empty()) throw std::invalid_argument("factor scope is empty");
  for (Index v : scope)
    if (v < 0 || v >= n_variables)
      throw std::invalid_argument("factor scope names unknown variable " + std::to_string(v + 1));
  std::vector<Index> unique_scope = scope;
  std::sort(unique_scope.begin(), unique_scope.end());
  if (std::adjacent_find(unique_scope.begin(), unique_scope.end()) != unique_scope.end())
    throw std::invalid_argument("factor scope repeats a variable");
  if (information.rows() != dim || information.cols() != dim)
    throw std::invalid_argument("information block does not match scope size");
  if (information_vector.size() != dim)
    throw std::invalid_argument("information vector does not match scope size");
  if (!information.isApprox(information.transpose(), 1e-12))
    throw std::invalid_argument("information block is not symmetric");
}

std::pair<SymmetricSparseMatrix, std::vector<double>> assemble_system(
    const GaussianFactorGraph& graph, const PrimaryOrder& order,
    const std::vector<double>* linearization_point) {
  graph.topology.validate();
  if (graph.factors.size() != graph.topology.factors.size())
    throw std::invalid_argument("factor count does not match topology");
  for (size_t k = 0; k < graph.factors.size(); ++k) {
    graph.factors[k].validate(graph.topology.n_variables);
    if (graph.factors[k].scope != graph.topology.factors[k])
      throw std::invalid_argument("factor " + std::to_string(k + 1) +
                                  " scope does not match topology");
  }
  if (linearization_point &&
      static_cast<Index>(linearization_point->size()) != graph.topology.n_variables)
    throw std::invalid_argument("linearization point has the wrong length");

  SymmetricSparseMatrix a(pattern_from_graph(graph.topology, order));
  std::vector<double> b(static_cast<size_t>(graph.topology.n_variables), 0.0);

  for (const auto& factor : graph.factors) {
    const auto dim = static_cast<Eigen::Index>(factor.scope.size());
    Eigen::VectorXd eta = factor.information_vector;
    if (linearization_point) {
      Eigen::VectorXd mu(dim);
      for (Eigen::Index r = 0; r < dim; ++r)
        mu(r) = (*linearization_point)[static_cast<size_t>(factor.scope[static_cast<size_t>(r)])];
      eta -= factor.information * mu;
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
      const Index pr = order.position(factor.scope[static_cast<size_t>(r)]);
      b[static_cast<size_t>(pr)] += eta(r);
      for (Eigen::Index c = 0; c < dim; ++c) {
        const Index pc = order.position(factor.scope[static_cast<size_t>(c)]);
        if (pc > pr) continue;  // scatter the lower triangle once
        a.add(pr, pc, factor.information(r, c));
      }
    }
  }
  return {std::move(a), std::move(b)};
}

Marginals extract_marginals(const Solution& solution, const SelectedInverse& selinv,
                            const PrimaryOrder& order) {
  const Index n = selinv.pattern.n();
  if (static_cast<Index>(solution.x.size()) != n || order.n() != n)
    throw std::invalid_argument("solution, selected inverse, and order sizes disagree");
  Marginals m;
  m.mean.resize(static_cast<size_t>(n));
  m.variance.resize(static_cast<size_t>(n));
  for (Index label = 0; label < n; ++label) {
    const Index p = order.position(label);
    m.mean[static_cast<size_t>(label)] = solution.x[static_cast<size_t>(p)];
    m.variance[static_cast<size_t>(label)] = selinv.value(p, p);
  }
  for (const auto& e : selinv.pattern.entries()) {
    if (e.row == e.col) continue;
    Index la = order.label_at(e.row);
    Index lb = order.label_at(e.col);
    if (la < lb) std::swap(la, lb);
    m.covariance[{la, lb}] = selinv.value(e.row, e.col);
  }
  return m;
}

std::vector<Index> unconstrained_variables(const FactorGraphTopology& topology) {
  std::vector<char> covered(static_cast<size_t>(topology.n_variables), 0);
  for (const auto& scope : topology.factors)
    for (Index v : scope) covered[static_cast<size_t>(v)] = 1;
  std::vector<Index> out;
  for (Index v = 0; v < topology.n_variables; ++v)
    if (!covered[static_cast<size_t>(v)]) out.push_back(v);
  return out;
}

void write_factor_graph(std::ostream& out, const GaussianFactorGraph& graph) {
  out << "VARS " << graph.topology.n_variables << "\n";
  out.precision(17);
  for (size_t k = 0; k < graph.factors.size(); ++k) {
    const auto& f = graph.factors[k];
    out << "FACTOR " << k + 1 << " SCOPE";
    for (Index v : f.scope) out << " " << v + 1;
    out << "\n";
    for (Eigen::Index r = 0; r < f.information.rows(); ++r) {
      for (Eigen::Index c = 0; c < f.information.cols(); ++c)
        out << (c ? " " : "") << f.information(r, c);
      out << "\n";
    }
    for (Eigen::Index r = 0; r < f.information_vector.size(); ++r)
      out << (r ? " " : "") << f.information_vector(r);
    out << "\n";
  }
}

GaussianFactorGraph read_factor_graph(std::istream& in) {
  GaussianFactorGraph graph;
  std::string tag;
  if (!(in >> tag >> graph.topology.n_variables) || tag != "VARS" ||
      graph.topology.n_variables < 1)
    throw std::invalid_argument("factor graph file must start with 'VARS <n>'");
  while (in >> tag) {
    if (tag != "FACTOR") throw std::invalid_argument("expected FACTOR, found '" + tag + "'");
    size_t k = 0;
    std::string scope_tag;
    if (!(in >> k >> scope_tag) || scope_tag != "SCOPE")
      throw std::invalid_argument("malformed FACTOR line");
    std::string rest;
    std::getline(in, rest);
    std::istringstream scope_in(rest);
    GaussianFactor f;
    Index label = 0;
    while (scope_in >> label) {
      if (label < 1 || label > graph.topology.n_variables)
        throw std::invalid_argument("factor scope names unknown variable " +
                                    std::to_string(label));
      f.scope.push_back(label - 1);
    }
    const auto dim = static_cast<Eigen::Index>(f.scope.size());
    if (dim == 0) throw std::invalid_argument("factor scope is empty");
    f.information.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c)
        if (!(in >> f.information(r, c)))
          throw std::invalid_argument("truncated information block in factor " +
                                      std::to_string(k));
    f.information_vector.resize(dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      if (!(in >> f.information_vector(r)))
        throw std::invalid_argument("truncated information vector in factor " + std::to_string(k));
    graph.topology.factors.push_back(f.scope);
    graph.factors.push_back(std::move(f));
  }
  return graph;
}

namespace {

/// Random PSD block J = M^T M scaled to O(1), plus a touch of diagonal for
/// binary factors so chains do not become nearly singular.
Eigen::MatrixXd random_psd(Eigen::Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = u(rng);
  return m.transpose() * m;
}

GaussianFactorGraph finish_graph(Index n, const std::vector<std::vector<Index>>& binary_scopes,
                                 std::mt19937_64& rng) {
  GaussianFactorGraph graph;
  graph.topology.n_variables = n;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> prior(0.5, 2.0);
  for (const auto& scope : binary_scopes) {
    GaussianFactor f;
    f.scope = scope;
    f.information = random_psd(static_cast<Eigen::Index>(scope.size()), rng);
    f.information_vector.resize(static_cast<Eigen::Index>(scope.size()));
    for (Eigen::Index r = 0; r < f.information_vector.size(); ++r)
      f.information_vector(r) = u(rng);
    graph.topology.factors.push_back(scope);
    graph.factors.push_back(std::move(f));
  }
  // unary priors keep the assembled matrix strictly positive definite
  for (Index v = 0; v < n; ++v) {
    GaussianFactor f;
    f.scope = {v};
    f.information = Eigen::MatrixXd::Constant(1, 1, prior(rng));
    f.information_vector = Eigen::VectorXd::Constant(1, u(rng));
    graph.topology.factors.push_back(f.scope);
    graph.factors.push_back(std::move(f));
  }
  return graph;
}

}  // namespace

GaussianFactorGraph gen_chain(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one variable");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> scopes;
  for (Index v = 0; v + 1 < n; ++v) scopes.push_back({v, v + 1});
  return finish_graph(n, scopes, rng);
}

GaussianFactorGraph gen_tree(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one variable");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> scopes;
  for (Index v = 1; v < n; ++v) {
    const Index parent = static_cast<Index>(rng() % static_cast<std::uint64_t>(v));
    scopes.push_back({parent, v});
  }
  return finish_graph(n, scopes, rng);
}

GaussianFactorGraph gen_loopy(Index n, Index extra_chords, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("loopy graphs need at least three variables");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> scopes;
  for (Index v = 0; v + 1 < n; ++v) scopes.push_back({v, v + 1});
  Index added = 0;
  while (added < extra_chords) {
    Index a = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    Index b = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    if (a == b || std::abs(a - b) == 1) continue;
    if (a < b) std::swap(a, b);
    if (std::find(scopes.begin(), scopes.end(), std::vector<Index>{b, a}) != scopes.end())
      continue;
    scopes.push_back({b, a});
    ++added;
  }
  return finish_graph(n, scopes, rng);
}

GaussianFactorGraph gen_demo6(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> scopes{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}};
  return finish_graph(6, scopes, rng);
}

}  // namespace gsi
