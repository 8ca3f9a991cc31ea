#include "structack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace structack {

namespace {

// Shortest-augmenting-path Hungarian with row/column potentials
// (1-indexed internally). Fills row_match and returns the potentials.
struct Duals {
  std::vector<double> row;  // u
  std::vector<double> col;  // v
};

Duals solve_potentials(const Matrix& cost, std::vector<int>& row_match) {
  const int k = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> match(k + 1, 0);  // col -> row, 1-indexed
  std::vector<int> way(k + 1, 0);

  for (int i = 1; i <= k; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  row_match.assign(k, -1);
  for (int j = 1; j <= k; ++j) row_match[match[j] - 1] = j - 1;
  return {std::move(u), std::move(v)};
}

// Lexicographic minimization over the optima. All optimal assignments use
// only edges with zero reduced cost (complementary slackness), so we fix
// rows in order to the smallest tight column that still leaves a perfect
// matching on the rest.
class LexTightMatcher {
 public:
  LexTightMatcher(const Matrix& cost, const Duals& duals, std::vector<int> row_match)
      : k_(cost.rows()), row_match_(std::move(row_match)), col_match_(k_, -1),
        col_fixed_(k_, 0), visited_(k_, 0), tight_(k_) {
    double scale = 0.0;
    for (const double c : cost.data()) scale = std::max(scale, std::fabs(c));
    const double eps = 1e-9 * (1.0 + scale);
    for (int i = 0; i < k_; ++i)
      for (int j = 0; j < k_; ++j)
        if (cost(i, j) - duals.row[i + 1] - duals.col[j + 1] <= eps) tight_[i].push_back(j);
    for (int i = 0; i < k_; ++i) col_match_[row_match_[i]] = i;
  }

  std::vector<int> run() {
    for (int i = 0; i < k_; ++i) {
      const int current = row_match_[i];
      for (const int candidate : tight_[i]) {
        if (candidate >= current) break;  // current column is always feasible
        if (col_fixed_[candidate]) continue;
        if (try_take(i, candidate)) break;
      }
      col_fixed_[row_match_[i]] = 1;
    }
    return row_match_;
  }

 private:
  // Attempt to give `col` to `row`; the displaced row must reach the
  // column freed by `row` through an alternating path of tight edges.
  bool try_take(int row, int col) {
    const int freed = row_match_[row];
    const int displaced = col_match_[col];
    row_match_[row] = col;
    col_match_[col] = row;
    col_match_[freed] = -1;
    std::fill(visited_.begin(), visited_.end(), 0);
    visited_[col] = 1;
    if (augment(displaced)) return true;
    row_match_[row] = freed;
    col_match_[freed] = row;
    col_match_[col] = displaced;
    return false;
  }

  bool augment(int row) {
    for (const int col : tight_[row]) {
      if (visited_[col] || col_fixed_[col]) continue;
      visited_[col] = 1;
      if (col_match_[col] == -1 || augment(col_match_[col])) {
        row_match_[row] = col;
        col_match_[col] = row;
        return true;
      }
    }
    return false;
  }

  int k_;
  std::vector<int> row_match_;
  std::vector<int> col_match_;
  std::vector<char> col_fixed_;
  std::vector<char> visited_;
  std::vector<std::vector<int>> tight_;
};

}  // namespace

AssignmentResult min_cost_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols())
    throw std::invalid_argument("min_cost_assignment: matrix must be square");
  for (const double c : cost.data())
    if (!std::isfinite(c))
      throw std::invalid_argument("min_cost_assignment: non-finite cost entry");

  AssignmentResult result;
  if (cost.rows() == 0) return result;

  std::vector<int> row_match;
  const Duals duals = solve_potentials(cost, row_match);
  result.permutation = LexTightMatcher(cost, duals, std::move(row_match)).run();
  for (int i = 0; i < cost.rows(); ++i) result.total_cost += cost(i, result.permutation[i]);
  return result;
}

}  // namespace structack
