#include "tg/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tg {

// Standard reduction: shift payoffs positive, then solve
//   max 1'y  s.t.  A y <= 1, y >= 0
// by primal simplex from the (feasible) slack basis. The optimum z equals
// 1/v for the shifted game; y/z is the column player's strategy and the
// duals (objective-row coefficients of the slacks) scaled by 1/z give the
// row player's. Bland's rule keeps the pivoting finite under degeneracy.
MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff) {
  size_t R = payoff.size();
  if (R == 0 || payoff[0].empty()) throw std::invalid_argument("empty payoff matrix");
  size_t C = payoff[0].size();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : payoff) {
    if (row.size() != C) throw std::invalid_argument("ragged payoff matrix");
    for (double x : row) {
      if (std::isnan(x)) throw std::invalid_argument("NaN payoff entry");
      lo = std::min(lo, x);
    }
  }
  double shift = 1.0 - lo;

  // Tableau rows: R constraints, then the objective row; columns: y (C),
  // slacks (R), rhs.
  size_t cols = C + R + 1;
  std::vector<std::vector<double>> t(R + 1, std::vector<double>(cols, 0.0));
  for (size_t i = 0; i < R; ++i) {
    for (size_t j = 0; j < C; ++j) t[i][j] = payoff[i][j] + shift;
    t[i][C + i] = 1.0;
    t[i][cols - 1] = 1.0;
  }
  for (size_t j = 0; j < C; ++j) t[R][j] = -1.0;  // maximize sum y

  std::vector<size_t> basis(R);
  for (size_t i = 0; i < R; ++i) basis[i] = C + i;

  const double eps = 1e-12;
  for (;;) {
    // Bland: entering = lowest-index column with negative reduced cost.
    size_t enter = cols - 1;
    for (size_t j = 0; j + 1 < cols; ++j)
      if (t[R][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols - 1) break;

    size_t leave = R;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < R; ++i) {
      if (t[i][enter] <= eps) continue;
      double ratio = t[i][cols - 1] / t[i][enter];
      if (ratio < best - eps || (ratio < best + eps && (leave == R || basis[i] < basis[leave]))) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == R) throw std::runtime_error("unbounded matrix-game LP");

    double piv = t[leave][enter];
    for (size_t j = 0; j < cols; ++j) t[leave][j] /= piv;
    for (size_t i = 0; i <= R; ++i) {
      if (i == leave) continue;
      double f = t[i][enter];
      if (f == 0.0) continue;
      for (size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  double z = t[R][cols - 1];
  MatrixGameSolution sol;
  sol.value = 1.0 / z - shift;
  sol.col_strategy.assign(C, 0.0);
  for (size_t i = 0; i < R; ++i)
    if (basis[i] < C) sol.col_strategy[basis[i]] = t[i][cols - 1] / z;
  sol.row_strategy.assign(R, 0.0);
  for (size_t i = 0; i < R; ++i) sol.row_strategy[i] = t[R][C + i] / z;

  // Clean round-off: clamp and renormalize both strategies.
  for (auto* v : {&sol.row_strategy, &sol.col_strategy}) {
    double sum = 0.0;
    for (double& x : *v) sum += (x = std::max(0.0, x));
    if (sum > 0)
      for (double& x : *v) x /= sum;
  }
  return sol;
}

}  // namespace tg
