#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gsi {

/// Variable / matrix index. 0-based internally; every external interface
/// (file formats, CLI output, error messages) reports 1-based indices.
using Index = std::int32_t;

/// Lower-triangle index pair, row >= col.
struct IndexPair {
  Index row = 0;
  Index col = 0;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

inline std::string to_string_1based(IndexPair p) {
  return "(" + std::to_string(p.row + 1) + "," + std::to_string(p.col + 1) + ")";
}

/// Thrown when a pivot S_jj drops below the positive-definiteness threshold.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(Index failing_index, double pivot)
      : std::runtime_error("matrix is not positive definite: pivot S(" +
                           std::to_string(failing_index + 1) + "," +
                           std::to_string(failing_index + 1) + ") = " +
                           std::to_string(pivot)),
        index(failing_index) {}

  Index index;
};

/// Thrown by iterative runs that fail to converge within their round budget.
/// Carries enough context to diagnose; the full trace stays with the caller.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(int rounds, const std::string& detail)
      : std::runtime_error("no convergence after " + std::to_string(rounds) +
                           " rounds: " + detail),
        rounds(rounds) {}

  int rounds;
};

}  // namespace gsi
