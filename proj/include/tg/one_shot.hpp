#pragma once

#include "tg/game.hpp"

#include <cstdint>
#include <vector>

namespace tg {

/// One state's one-shot game: payoff V[team joint code][opponent action],
/// the expected next-step value of each joint choice under a valuation.
struct LocalGame {
  std::vector<int> team_sizes;  // local action count per team player
  int opp_count = 0;
  std::vector<std::vector<double>> V;

  std::int64_t team_joint_count() const {
    std::int64_t n = 1;
    for (int k : team_sizes) n *= k;
    return n;
  }
};

/// Per-player mixed local choice; the team's joint distribution is the product.
struct ProductSelector {
  std::vector<std::vector<double>> probs;
};

enum class SolveStatus { exact, local_search, oracle };

struct LocalSolution {
  double value = 0.0;
  ProductSelector selector;       // independent mode
  std::vector<double> joint;      // shared mode: distribution over joint actions
  SolveStatus status = SolveStatus::exact;
};

struct IndependentConfig {
  int restarts = 16;         // 1 uniform start + restarts-1 Dirichlet(1) starts
  int max_steps = 500;
  double stagnation_tol = 1e-9;
  std::uint64_t seed = 0;
};

/// V(ā,b) = Σ_t δ(s,ā,b)(t)·v(t). Throws std::out_of_range on a bad state.
LocalGame build_local_game(const Game& game, int state, const std::vector<double>& v);

/// min over opponent *pure* actions of the expected payoff — exact, because
/// the inner inf over mixed opponent choices is attained at a vertex.
/// Ties break toward the lowest opponent action index.
double best_response_value(const LocalGame& local, const ProductSelector& sel);

/// Exact matrix-game solve treating team joint actions as one player.
LocalSolution solve_shared(const LocalGame& local);

/// Multi-start projected ascent over the product of per-player simplices;
/// soft-min annealing with an exact-min polish. The returned value is always
/// re-evaluated via best_response_value, hence a sound lower bound.
LocalSolution solve_independent(const LocalGame& local, const IndependentConfig& cfg);

/// Grid-search oracle: per-player simplex points with coordinates k/resolution.
/// Guards: team joint actions ≤ 64 and total grid points ≤ 10⁷.
double brute_force_independent(const LocalGame& local, int resolution);

}  // namespace tg
