#pragma once

#include <vector>

namespace tg {

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;  // maximin mixed strategy, row player maximizes
  std::vector<double> col_strategy;  // minimax mixed strategy
};

/// Solves the zero-sum matrix game payoff[r][c] exactly (up to LP round-off):
/// value = max_p min_q p'Aq. Throws std::invalid_argument on empty or NaN input.
MatrixGameSolution solve_matrix_game(const std::vector<std::vector<double>>& payoff);

}  // namespace tg
