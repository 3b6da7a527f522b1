#pragma once

#include "tg/game.hpp"
#include "tg/one_shot.hpp"
#include "tg/smt_bridge.hpp"

#include <string>
#include <vector>

namespace tg {

enum class Mode { independent, shared };
enum class Backend { opt, smt, hybrid };

struct StopCriteria {
  double tolerance = 1e-4;
  int max_iters = 10000;
};

struct VIConfig {
  Mode mode = Mode::independent;
  Backend backend = Backend::opt;
  StopCriteria stop;
  IndependentConfig local;  // local.seed is the global seed
  std::optional<SolverEndpoint> solver;  // required for smt, optional for hybrid
  int jobs = 1;
};

struct VIResult {
  std::vector<double> valuation;      // per state of solved_form(game, mode)
  int iterations = 0;
  std::vector<double> delta_history;  // max per-sweep change
  MemorylessProfile profile;          // w.r.t. solved_form(game, mode)
  Mode mode = Mode::independent;
  Backend backend = Backend::opt;
  std::vector<std::string> warnings;
};

/// The game the iteration actually runs on: the input itself in independent
/// mode, the meta-player merge in shared mode. States are unchanged either
/// way, so valuations transfer.
Game solved_form(const Game& game, Mode mode);

/// v₀ = target indicator; each sweep re-solves every non-target state's local
/// game under the previous valuation (Jacobi) and keeps the per-state maximum
/// seen so far, so iterates are nondecreasing sound lower bounds. Stops when
/// the max per-state change drops below stop.tolerance.
VIResult value_iteration(const Game& game, const VIConfig& cfg);

/// Exact guarantee of a fixed profile: min-reachability value iteration on
/// the induced MDP from the all-zero valuation. Every iterate is a certified
/// per-state lower bound on what the profile achieves.
std::vector<double> certify(const Game& game, const MemorylessProfile& profile,
                            const StopCriteria& stop);

enum class ThresholdVerdict { Yes, Unknown };

struct ThresholdResult {
  ThresholdVerdict verdict = ThresholdVerdict::Unknown;
  std::vector<double> certified;  // per-state certified lower bounds
  MemorylessProfile profile;      // w.r.t. solved_form(game, cfg.mode)
  VIResult vi;
};

/// Semi-decision: Yes iff the certified lower bound at the initial state
/// strictly exceeds t. Never answers No.
ThresholdResult decide_threshold_vi(const Game& game, const Rational& t,
                                    const VIConfig& cfg);

}  // namespace tg
