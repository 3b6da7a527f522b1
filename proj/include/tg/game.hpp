#pragma once

#include "tg/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tg {

/// Probability distribution over states, exact rationals with cached floats.
struct Distribution {
  struct Entry {
    int state = -1;
    Rational prob;
    double prob_f = 0.0;
  };
  std::vector<Entry> support;

  void add(int state, Rational p);
  /// Sorts the support by state index and merges duplicates.
  void normalize_support();
  bool sums_to_one() const;
  Rational mass() const;
};

Distribution dirac(int state);

/// Team concurrent stochastic reachability game. Players are stored with the
/// team in declaration order and the single opponent last, so joint actions
/// have a canonical key. A game with an empty team is an MDP for the opponent.
struct Game {
  std::vector<std::string> players;  // team players first, opponent last
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;  // per player, full alphabet

  // available[p][s]: indices into actions[p], non-empty, ascending.
  std::vector<std::vector<std::vector<int>>> available;

  // transitions[s]: indexed by the joint availability code at s (player 0
  // slowest, opponent fastest). Missing entries have empty support.
  std::vector<std::vector<Distribution>> transitions;

  std::vector<bool> is_target;
  int initial = 0;
  std::vector<std::vector<std::string>> labels;  // per state, may be empty

  int player_count() const { return static_cast<int>(players.size()); }
  int team_size() const { return player_count() - 1; }
  int opponent() const { return player_count() - 1; }
  int state_count() const { return static_cast<int>(states.size()); }

  const std::vector<int>& avail(int player, int state) const {
    return available[player][state];
  }

  /// Number of joint availability codes at state s.
  std::int64_t joint_count(int s) const;
  /// Number of team joint actions at state s (product over team players).
  std::int64_t team_joint_count(int s) const;

  /// Encodes per-player local availability indices into a joint code.
  std::int64_t joint_code(int s, const std::vector<int>& local) const;
  /// Inverse of joint_code.
  std::vector<int> joint_decode(int s, std::int64_t code) const;

  const Distribution& delta(int s, std::int64_t joint) const;
  void set_delta(int s, std::int64_t joint, Distribution d);
  void reserve_transitions();

  int state_index(const std::string& name) const;   // -1 when absent
  int player_index(const std::string& name) const;  // -1 when absent
  int action_index(int player, const std::string& name) const;
};

enum class Severity { error, warning };

struct Issue {
  Severity severity;
  std::string location;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;
  void add(Severity sev, std::string loc, std::string msg);
  std::string to_string() const;
};

/// Checks every structural invariant: non-empty availability sets, complete
/// transitions for available joint actions, exact distribution sums, and
/// absorbing targets. Never throws; all findings land in the report.
ValidationReport validate(const Game& game);

/// Merges all team players into a single meta-player over joint actions.
/// The value of the merged game is the shared-randomness value.
Game merge_team(const Game& game);

/// Makes every state outside `keep` absorbing (self-loop under all joint
/// actions). Throws std::invalid_argument on unknown state indices.
Game restrict_absorbing(const Game& game, const std::vector<int>& keep);

/// Redirects all transitions out of target states to self-loops. The
/// standard absorbing-closure transformation; preserves reachability values.
Game absorbing_closure(const Game& game);

struct MemorylessProfile {
  // probs[p][s]: distribution over available[p][s], aligned by position.
  std::vector<std::vector<std::vector<Rational>>> probs;

  static MemorylessProfile uniform(const Game& game);
  bool valid_for(const Game& game, std::string* why = nullptr) const;
};

/// Fixes the team's behaviour to `profile`; the result is an opponent-only
/// game (an MDP) whose transitions are the profile-weighted mixtures,
/// computed in exact rationals.
Game induced_mdp(const Game& game, const MemorylessProfile& profile);

/// Rebuilds the game so that `coalition` (player indices) is the team and
/// all remaining players are merged into one opponent. Used by the logic
/// layer, where coalitions need not coincide with the declared team.
Game set_coalition(const Game& game, const std::vector<int>& coalition);

}  // namespace tg
