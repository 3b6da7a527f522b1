#include "tg/one_shot.hpp"

#include "tg/matrix_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace tg {

namespace {

// Product weight of each team joint code under the selector (player 0 slowest).
std::vector<double> joint_weights(const LocalGame& lg, const ProductSelector& sel) {
  std::int64_t J = lg.team_joint_count();
  std::vector<double> w(static_cast<size_t>(J));
  for (std::int64_t j = 0; j < J; ++j) {
    std::int64_t code = j;
    double p = 1.0;
    for (int k = static_cast<int>(lg.team_sizes.size()) - 1; k >= 0; --k) {
      int n = lg.team_sizes[static_cast<size_t>(k)];
      p *= sel.probs[static_cast<size_t>(k)][static_cast<size_t>(code % n)];
      code /= n;
    }
    w[static_cast<size_t>(j)] = p;
  }
  return w;
}

std::vector<double> opponent_payoffs(const LocalGame& lg, const std::vector<double>& w) {
  std::vector<double> e(static_cast<size_t>(lg.opp_count), 0.0);
  for (size_t j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) continue;
    for (int b = 0; b < lg.opp_count; ++b) e[static_cast<size_t>(b)] += w[j] * lg.V[j][static_cast<size_t>(b)];
  }
  return e;
}

// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int rho = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0) {
      rho = static_cast<int>(i + 1);
      tau = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - tau);
}

}  // namespace

LocalGame build_local_game(const Game& g, int s, const std::vector<double>& v) {
  if (s < 0 || s >= g.state_count()) throw std::out_of_range("state not in game");
  LocalGame lg;
  for (int p = 0; p < g.team_size(); ++p)
    lg.team_sizes.push_back(static_cast<int>(g.available[p][s].size()));
  lg.opp_count = static_cast<int>(g.available[g.opponent()][s].size());
  std::int64_t J = lg.team_joint_count();
  lg.V.assign(static_cast<size_t>(J), std::vector<double>(static_cast<size_t>(lg.opp_count), 0.0));
  for (std::int64_t t = 0; t < J; ++t) {
    for (int b = 0; b < lg.opp_count; ++b) {
      // Team part of the game's joint code is the slow digits; opponent fastest.
      const auto& d = g.delta(s, t * lg.opp_count + b);
      double acc = 0.0;
      for (const auto& e : d.support) acc += e.prob_f * v[static_cast<size_t>(e.state)];
      lg.V[static_cast<size_t>(t)][static_cast<size_t>(b)] = acc;
    }
  }
  return lg;
}

double best_response_value(const LocalGame& lg, const ProductSelector& sel) {
  if (sel.probs.size() != lg.team_sizes.size()) throw std::invalid_argument("selector arity mismatch");
  for (size_t k = 0; k < sel.probs.size(); ++k)
    if (static_cast<int>(sel.probs[k].size()) != lg.team_sizes[k])
      throw std::invalid_argument("selector shape mismatch");
  auto e = opponent_payoffs(lg, joint_weights(lg, sel));
  double best = e[0];
  for (double x : e) best = std::min(best, x);
  return best;
}

LocalSolution solve_shared(const LocalGame& lg) {
  auto sol = solve_matrix_game(lg.V);
  LocalSolution out;
  out.status = SolveStatus::exact;
  out.joint = sol.row_strategy;
  // Re-evaluate: min over columns of the mixed row payoff.
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < lg.opp_count; ++b) {
    double e = 0.0;
    for (size_t j = 0; j < out.joint.size(); ++j) e += out.joint[j] * lg.V[j][static_cast<size_t>(b)];
    best = std::min(best, e);
  }
  out.value = best;
  return out;
}

LocalSolution solve_independent(const LocalGame& lg, const IndependentConfig& cfg) {
  if (cfg.restarts < 1) throw std::invalid_argument("restart count must be >= 1");
  size_t m = lg.team_sizes.size();

  if (m <= 1) {
    // One (or zero) team player: every team distribution is a product
    // distribution, so the matrix-game solve is exact here too.
    LocalSolution sh = solve_shared(lg);
    LocalSolution out;
    out.status = SolveStatus::exact;
    if (m == 1) out.selector.probs = {sh.joint};
    out.value = best_response_value(lg, out.selector);
    return out;
  }

  ProductSelector best_sel;
  double best_val = -std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(cfg.seed);
  std::exponential_distribution<double> expo(1.0);

  for (int r = 0; r < cfg.restarts; ++r) {
    ProductSelector sel;
    sel.probs.resize(m);
    for (size_t k = 0; k < m; ++k) {
      int n = lg.team_sizes[k];
      sel.probs[k].assign(static_cast<size_t>(n), 1.0 / n);
      if (r > 0) {
        // Dirichlet(1): normalized exponentials.
        double sum = 0.0;
        for (double& x : sel.probs[k]) sum += (x = expo(rng));
        for (double& x : sel.probs[k]) x /= sum;
      }
    }

    double local_best = best_response_value(lg, sel);
    ProductSelector local_best_sel = sel;
    double temperature = 0.5;
    int stale = 0;

    for (int step = 0; step < cfg.max_steps; ++step) {
      auto w = joint_weights(lg, sel);
      auto e = opponent_payoffs(lg, w);

      // Soft-min weights over opponent actions; near-zero temperature acts
      // as the exact-min subgradient (polish phase).
      std::vector<double> sw(e.size());
      double emin = *std::min_element(e.begin(), e.end());
      double z = 0.0;
      for (size_t b = 0; b < e.size(); ++b) z += (sw[b] = std::exp(-(e[b] - emin) / temperature));
      for (double& x : sw) x /= z;

      // d f / d sel[k][a] = Σ_b sw_b Σ_{ā: a_k=a} (∏_{q≠k} sel_q) V(ā,b).
      double lr = 0.2 / (1.0 + 0.01 * step);
      ProductSelector next = sel;
      for (size_t k = 0; k < m; ++k) {
        int n = lg.team_sizes[k];
        std::vector<double> grad(static_cast<size_t>(n), 0.0);
        std::int64_t stride = 1;
        for (size_t q = k + 1; q < m; ++q) stride *= lg.team_sizes[q];
        for (std::int64_t j = 0; j < lg.team_joint_count(); ++j) {
          int a = static_cast<int>((j / stride) % n);
          double others = sel.probs[k][static_cast<size_t>(a)] > 0
                              ? w[static_cast<size_t>(j)] / sel.probs[k][static_cast<size_t>(a)]
                              : 0.0;
          if (sel.probs[k][static_cast<size_t>(a)] == 0.0) {
            // Recompute the co-players' product directly.
            others = 1.0;
            std::int64_t code = j;
            for (int q = static_cast<int>(m) - 1; q >= 0; --q) {
              int nq = lg.team_sizes[static_cast<size_t>(q)];
              int aq = static_cast<int>(code % nq);
              code /= nq;
              if (static_cast<size_t>(q) != k) others *= sel.probs[static_cast<size_t>(q)][static_cast<size_t>(aq)];
            }
          }
          double contrib = 0.0;
          for (size_t b = 0; b < sw.size(); ++b) contrib += sw[b] * lg.V[static_cast<size_t>(j)][b];
          grad[static_cast<size_t>(a)] += others * contrib;
        }
        for (int a = 0; a < n; ++a) next.probs[k][static_cast<size_t>(a)] += lr * grad[static_cast<size_t>(a)];
        project_simplex(next.probs[k]);
      }
      sel = std::move(next);
      temperature = std::max(temperature * 0.97, 1e-4);

      double val = best_response_value(lg, sel);
      if (val > local_best + cfg.stagnation_tol) {
        local_best = val;
        local_best_sel = sel;
        stale = 0;
      } else if (++stale >= 50) {
        break;
      }
    }

    if (local_best > best_val) {  // ties keep the earlier restart
      best_val = local_best;
      best_sel = local_best_sel;
    }
  }

  LocalSolution out;
  out.status = SolveStatus::local_search;
  out.selector = std::move(best_sel);
  out.value = best_response_value(lg, out.selector);
  return out;
}

namespace {

// All length-n compositions of `res` (simplex grid points scaled by res).
void compositions(int n, int res, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (n == 1) {
    cur.push_back(res);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = 0; k <= res; ++k) {
    cur.push_back(k);
    compositions(n - 1, res - k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

double brute_force_independent(const LocalGame& lg, int resolution) {
  if (resolution < 1) throw std::invalid_argument("resolution must be positive");
  if (lg.team_joint_count() > 64) throw std::invalid_argument("action-count guard exceeded");

  size_t m = lg.team_sizes.size();
  // C(res + n - 1, n - 1) grid points per player; size the whole product
  // before materializing anything.
  double total = 1.0;
  for (size_t k = 0; k < m; ++k) {
    double pts = 1.0;
    for (int i = 1; i < lg.team_sizes[k]; ++i)
      pts = pts * (resolution + i) / i;
    total *= pts;
    if (total > 1e7) throw std::invalid_argument("grid-size guard exceeded");
  }
  std::vector<std::vector<std::vector<int>>> grids(m);
  for (size_t k = 0; k < m; ++k) {
    std::vector<int> cur;
    compositions(lg.team_sizes[k], resolution, cur, grids[k]);
  }

  ProductSelector sel;
  sel.probs.resize(m);
  std::vector<size_t> idx(m, 0);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (size_t k = 0; k < m; ++k) {
      sel.probs[k].resize(grids[k][idx[k]].size());
      for (size_t a = 0; a < sel.probs[k].size(); ++a)
        sel.probs[k][a] = static_cast<double>(grids[k][idx[k]][a]) / resolution;
    }
    best = std::max(best, best_response_value(lg, sel));
    int k = static_cast<int>(m) - 1;
    while (k >= 0) {
      if (++idx[static_cast<size_t>(k)] < grids[static_cast<size_t>(k)].size()) break;
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return best;
}

}  // namespace tg
