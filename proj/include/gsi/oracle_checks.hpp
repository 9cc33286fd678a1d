#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gsi/kron.hpp"
#include "gsi/solver.hpp"

namespace gsi::oracle {

/// Seeded property checks behind the `verify` command and the structural
/// acceptance suite. Each returns "" on success or a short failure note.
/// Dimensions are drawn in [2, n_max].

std::string check_theorem1_closure(Index n_max, std::uint64_t seed);
std::string check_c_upper_triangular_basic(Index n_max, std::uint64_t seed);
std::string check_g_lower_triangular_basic(Index n_max, std::uint64_t seed);
std::string check_ultimate_blocks(Index n_max, std::uint64_t seed);
std::string check_entry_formulas(Index n_max, std::uint64_t seed);
std::string check_kron_identities(Index n_max, std::uint64_t seed);
std::string check_elim_dup_identities(Index n_max, std::uint64_t seed);
std::string check_printed_e_d_n3(std::uint64_t seed_unused = 0);
std::string check_recursions_vs_dense(Index n_max, std::uint64_t seed);
std::string check_reduction_chains(Index n_max, std::uint64_t seed);
std::string check_ultimate_is_swap_fixed_point(Index n_max, std::uint64_t seed);

using NamedCheck = std::pair<std::string, std::function<std::string(std::uint64_t)>>;
std::vector<NamedCheck> all_checks(Index n_max);

/// Test-problem builders shared with the test suites.

/// Random four-corners-closed pattern from a random tree (+ chords when
/// loopy) graph.
SparsityPattern random_closed_pattern(Index n, bool loopy, std::uint64_t seed);

/// SPD matrix: M^T M masked to a random graph pattern, n added on the
/// diagonal (M entries uniform in [-1, 1]).
SymmetricSparseMatrix random_spd_matrix(Index n, bool loopy, std::uint64_t seed);

/// Random factor values on a random closed pattern: L uniform in [-1, 1],
/// S uniform in [0.5, 2].
LdlFactors random_factors(Index n, bool loopy, std::uint64_t seed);

std::vector<double> random_vector(Index n, std::uint64_t seed);

}  // namespace gsi::oracle
