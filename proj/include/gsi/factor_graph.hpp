#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "gsi/pattern.hpp"
#include "gsi/solver.hpp"
#include "gsi/sparse_matrix.hpp"
#include "gsi/types.hpp"

namespace gsi {

/// One Gaussian factor in information form over a scalar-variable scope:
/// contributes `information` to A and `information_vector` to b.
struct GaussianFactor {
  std::vector<Index> scope;        // external variable labels
  Eigen::MatrixXd information;     // symmetric PSD, scope-sized
  Eigen::VectorXd information_vector;

  void validate(Index n_variables) const;
};

/// Factor scopes plus values, ready for assembly.
struct GaussianFactorGraph {
  FactorGraphTopology topology;
  std::vector<GaussianFactor> factors;
  // factors[k].scope must equal topology.factors[k]
};

/// Per-variable means/variances and per-linked-pair covariances, keyed by
/// external labels.
struct Marginals {
  std::vector<double> mean;                 // by label
  std::vector<double> variance;             // by label
  std::map<IndexPair, double> covariance;   // (max label, min label) -> y
};

/// Scatters factor blocks into A and b under the order. When a linearization
/// point is supplied, b becomes sum_k (eta_k - J_k mu_k), i.e. the
/// information residual at mu; with the default mu = 0 this is the plain
/// information-vector sum.
std::pair<SymmetricSparseMatrix, std::vector<double>> assemble_system(
    const GaussianFactorGraph& graph, const PrimaryOrder& order,
    const std::vector<double>* linearization_point = nullptr);

/// Maps the positional solution back to external labels.
Marginals extract_marginals(const Solution& solution, const SelectedInverse& selinv,
                            const PrimaryOrder& order);

/// Labels that appear in no factor scope. A positive-definite A needs every
/// variable constrained; this is the usual culprit when assembly output
/// fails the pivot check.
std::vector<Index> unconstrained_variables(const FactorGraphTopology& topology);

/// Text format:
///   VARS <n>
///   FACTOR <k> SCOPE <labels...>       (1-based labels)
///   <row-major information block, one scope-sized row per line>
///   <information vector on one line>
void write_factor_graph(std::ostream& out, const GaussianFactorGraph& graph);
GaussianFactorGraph read_factor_graph(std::istream& in);

/// Seeded problem generators. Every factor gets a random PSD information
/// block plus each variable a unary prior, so the assembled A is SPD.
GaussianFactorGraph gen_chain(Index n, std::uint64_t seed);
GaussianFactorGraph gen_tree(Index n, std::uint64_t seed);
/// Chain plus `extra_chords` random chords.
GaussianFactorGraph gen_loopy(Index n, Index extra_chords, std::uint64_t seed);
/// The six-variable demo: a 1-2-3-4-5-6 chain closed by a 2-6 factor.
GaussianFactorGraph gen_demo6(std::uint64_t seed);

}  // namespace gsi
