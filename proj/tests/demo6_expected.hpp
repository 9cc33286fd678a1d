#pragma once

// Expected per-agent update equations for the six-variable demo problem
// (chain 1-2-3-4-5-6 closed by a 2-6 coupling), derived by hand from the
// factorization, substitution, and inverse recursions. Indices are written
// 1-based to match the derivation notes and converted on construction.

#include <vector>

#include "gsi/mp.hpp"

namespace demo6 {

using gsi::Index;
using gsi::mp::UpdateEquation;
using gsi::mp::Var;
using gsi::mp::VarKind;

struct Eq1 {
  VarKind kind;
  int i, j;                  // 1-based target
  bool constant;             // A_ij / b_i / 1 over S_jj present
  std::vector<int> first;    // 1-based summation indices
  std::vector<int> second;   // second sum (y only)
};

inline UpdateEquation convert(const Eq1& e) {
  UpdateEquation eq;
  eq.target = Var{e.kind, static_cast<Index>(e.i - 1), static_cast<Index>(e.j - 1)};
  eq.has_constant = e.constant;
  for (int t : e.first) eq.first_terms.push_back(static_cast<Index>(t - 1));
  for (int t : e.second) eq.second_terms.push_back(static_cast<Index>(t - 1));
  return eq;
}

inline std::vector<std::vector<UpdateEquation>> expected_equations() {
  const std::vector<std::vector<Eq1>> agents = {
      // agent 1
      {
          {VarKind::S, 1, 1, true, {}, {}},
          {VarKind::W, 1, 1, true, {}, {}},
          {VarKind::X, 1, 1, true, {2}, {}},
          {VarKind::Y, 1, 1, true, {}, {2}},
      },
      // agent 2
      {
          {VarKind::S, 2, 2, true, {1}, {}},
          {VarKind::L, 2, 1, true, {}, {}},
          {VarKind::W, 2, 2, true, {1}, {}},
          {VarKind::X, 2, 2, true, {3, 6}, {}},
          {VarKind::Y, 2, 2, true, {}, {3, 6}},
          {VarKind::Y, 2, 1, false, {2}, {}},
      },
      // agent 3
      {
          {VarKind::S, 3, 3, true, {2}, {}},
          {VarKind::L, 3, 2, true, {}, {}},
          {VarKind::W, 3, 3, true, {2}, {}},
          {VarKind::X, 3, 3, true, {4, 6}, {}},
          {VarKind::Y, 3, 3, true, {}, {4, 6}},
          {VarKind::Y, 3, 2, false, {3}, {6}},
      },
      // agent 4
      {
          {VarKind::S, 4, 4, true, {3}, {}},
          {VarKind::L, 4, 3, true, {}, {}},
          {VarKind::W, 4, 4, true, {3}, {}},
          {VarKind::X, 4, 4, true, {5, 6}, {}},
          {VarKind::Y, 4, 4, true, {}, {5, 6}},
          {VarKind::Y, 4, 3, false, {4}, {6}},
      },
      // agent 5
      {
          {VarKind::S, 5, 5, true, {4}, {}},
          {VarKind::L, 5, 4, true, {}, {}},
          {VarKind::W, 5, 5, true, {4}, {}},
          {VarKind::X, 5, 5, true, {6}, {}},
          {VarKind::Y, 5, 5, true, {}, {6}},
          {VarKind::Y, 5, 4, false, {5}, {6}},
      },
      // agent 6
      {
          {VarKind::S, 6, 6, true, {2, 3, 4, 5}, {}},
          {VarKind::L, 6, 5, true, {4}, {}},
          {VarKind::L, 6, 4, false, {3}, {}},
          {VarKind::L, 6, 3, false, {2}, {}},
          {VarKind::L, 6, 2, true, {}, {}},
          {VarKind::W, 6, 6, true, {2, 3, 4, 5}, {}},
          {VarKind::X, 6, 6, true, {}, {}},
          {VarKind::Y, 6, 6, true, {}, {}},
          {VarKind::Y, 6, 5, false, {6}, {}},
          {VarKind::Y, 6, 4, false, {5, 6}, {}},
          {VarKind::Y, 6, 3, false, {4, 6}, {}},
          {VarKind::Y, 6, 2, false, {3, 6}, {}},
      },
  };
  std::vector<std::vector<UpdateEquation>> out;
  for (const auto& agent : agents) {
    std::vector<UpdateEquation> eqs;
    for (const auto& e : agent) eqs.push_back(convert(e));
    out.push_back(std::move(eqs));
  }
  return out;
}

}  // namespace demo6
