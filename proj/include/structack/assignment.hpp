// assignment.hpp — exact min-cost perfect matching on a square cost matrix.

#pragma once

#include <vector>

#include "structack/matrix.hpp"

namespace structack {

struct AssignmentResult {
  // Row i is matched to column permutation[i]; a bijection on [0, k).
  std::vector<int> permutation;
  double total_cost = 0.0;
};

// Hungarian method (shortest augmenting paths with potentials), O(k³).
// Among equal-cost optima the lexicographically smallest permutation is
// returned. Throws on non-square or non-finite input.
AssignmentResult min_cost_assignment(const Matrix& cost);

}  // namespace structack
