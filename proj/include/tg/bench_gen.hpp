#pragma once

#include "tg/game.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tg {

struct Digraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // directed u -> v
};

/// Rendezvous-vs-pursuer on a directed graph. States are position vectors
/// (team nodes, pursuer node); everyone may move along an out-edge or wait
/// (closed neighbourhood). Capture (any team member on the pursuer's node)
/// is an absorbing loss and takes precedence over rendezvous; rendezvous
/// (team together, away from the pursuer) is the absorbing target.
Game gen_pursuit(const Digraph& graph, const std::vector<int>& team_starts,
                 int pursuer_start);

/// The six benchmark pursuit graphs with their start positions.
Game pursuit_scenario(int scenario);

/// Grid navigation against adversarial wind. Each round first terminates
/// with probability 1/2 (routed to the canonical loss configuration: all
/// robots on cell 0); otherwise robots move subject to the wind rules.
/// Colliding configurations are absorbing losses. A collision-free state is
/// an absorbing target iff every goal cell is occupied by some robot.
Game gen_robot(int height, int width, const std::vector<std::pair<int, int>>& starts,
               const std::vector<std::pair<int, int>>& goal_cells);

/// The four benchmark robot scenarios (cells as (column, row), row 0 at the
/// bottom, matching the benchmark figures).
Game robot_scenario(int scenario);

/// Sensors draining buffers over C channels against a jammer. A jammed or
/// colliding transmission loses immediately (absorbing sink); the target is
/// the all-empty buffer vector.
Game gen_jamming(int channels, const std::vector<int>& buffers);

/// Two players claim (index, vertex) pairs; the opponent challenges an index
/// pair. Consistent claims forming an edge (or equal vertices for equal
/// indices) win; the game loops on index mismatch. The team wins almost
/// surely iff the graph has a k-clique.
Game gen_clique(int vertices, const std::vector<std::pair<int, int>>& edges, int k);

/// name ∈ {door, memory, door-merged}.
Game builtin(const std::string& name);

/// Σ_s ∏_p |Av_p(s)| — the table counting convention.
std::int64_t transition_count(const Game& game);

}  // namespace tg
