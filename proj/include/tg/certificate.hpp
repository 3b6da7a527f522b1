#pragma once

#include <vector>

namespace tg {

/// Witness for almost-sure reachability: a winning set, a rank per winning
/// state, and per-player action supports. Verified semantically, independent
/// of any encoding that produced it.
struct RankCertificate {
  std::vector<int> winning;  // state ids, ascending
  std::vector<int> rank;     // per state; -1 outside the winning set
  // supports[p][s]: action ids (into actions[p]); empty outside the winning set.
  std::vector<std::vector<std::vector<int>>> supports;
};

}  // namespace tg
