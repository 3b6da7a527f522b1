#include "tg/game.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tg {

void Distribution::add(int state, Rational p) {
  if (p == 0) return;
  Entry e;
  e.state = state;
  e.prob_f = to_double(p);
  e.prob = std::move(p);
  support.push_back(std::move(e));
}

void Distribution::normalize_support() {
  std::map<int, Rational> acc;
  for (auto& e : support) acc[e.state] += e.prob;
  support.clear();
  for (auto& [s, p] : acc) {
    if (p == 0) continue;
    Entry e;
    e.state = s;
    e.prob_f = to_double(p);
    e.prob = std::move(p);
    support.push_back(std::move(e));
  }
}

Rational Distribution::mass() const {
  Rational m = 0;
  for (const auto& e : support) m += e.prob;
  return m;
}

bool Distribution::sums_to_one() const { return mass() == 1; }

Distribution dirac(int state) {
  Distribution d;
  d.add(state, Rational(1));
  return d;
}

std::int64_t Game::joint_count(int s) const {
  std::int64_t n = 1;
  for (int p = 0; p < player_count(); ++p)
    n *= static_cast<std::int64_t>(available[p][s].size());
  return n;
}

std::int64_t Game::team_joint_count(int s) const {
  std::int64_t n = 1;
  for (int p = 0; p < team_size(); ++p)
    n *= static_cast<std::int64_t>(available[p][s].size());
  return n;
}

std::int64_t Game::joint_code(int s, const std::vector<int>& local) const {
  std::int64_t code = 0;
  for (int p = 0; p < player_count(); ++p)
    code = code * static_cast<std::int64_t>(available[p][s].size()) + local[p];
  return code;
}

std::vector<int> Game::joint_decode(int s, std::int64_t code) const {
  std::vector<int> local(player_count());
  for (int p = player_count() - 1; p >= 0; --p) {
    auto n = static_cast<std::int64_t>(available[p][s].size());
    local[p] = static_cast<int>(code % n);
    code /= n;
  }
  return local;
}

const Distribution& Game::delta(int s, std::int64_t joint) const {
  return transitions[s][static_cast<size_t>(joint)];
}

void Game::set_delta(int s, std::int64_t joint, Distribution d) {
  transitions[s][static_cast<size_t>(joint)] = std::move(d);
}

void Game::reserve_transitions() {
  transitions.assign(states.size(), {});
  for (int s = 0; s < state_count(); ++s)
    transitions[s].resize(static_cast<size_t>(joint_count(s)));
}

int Game::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

int Game::player_index(const std::string& name) const {
  auto it = std::find(players.begin(), players.end(), name);
  return it == players.end() ? -1 : static_cast<int>(it - players.begin());
}

int Game::action_index(int player, const std::string& name) const {
  const auto& a = actions[player];
  auto it = std::find(a.begin(), a.end(), name);
  return it == a.end() ? -1 : static_cast<int>(it - a.begin());
}

void ValidationReport::add(Severity sev, std::string loc, std::string msg) {
  if (sev == Severity::error) ok = false;
  issues.push_back({sev, std::move(loc), std::move(msg)});
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& i : issues)
    os << (i.severity == Severity::error ? "error" : "warning") << " at "
       << i.location << ": " << i.message << "\n";
  return os.str();
}

namespace {

std::string joint_name(const Game& g, int s, std::int64_t code) {
  auto local = g.joint_decode(s, code);
  std::ostringstream os;
  os << "(";
  for (int p = 0; p < g.player_count(); ++p) {
    if (p) os << ",";
    os << g.actions[p][g.available[p][s][local[p]]];
  }
  os << ")";
  return os.str();
}

}  // namespace

ValidationReport validate(const Game& g) {
  ValidationReport r;
  if (g.players.empty()) {
    r.add(Severity::error, "players", "game needs at least the opponent");
    return r;
  }
  if (g.states.empty()) {
    r.add(Severity::error, "states", "no states");
    return r;
  }
  if (g.initial < 0 || g.initial >= g.state_count())
    r.add(Severity::error, "initial", "initial state out of range");
  if (static_cast<int>(g.is_target.size()) != g.state_count())
    r.add(Severity::error, "targets", "target flags size mismatch");
  if (static_cast<int>(g.available.size()) != g.player_count() ||
      static_cast<int>(g.actions.size()) != g.player_count()) {
    r.add(Severity::error, "players", "per-player tables size mismatch");
    return r;
  }

  for (int p = 0; p < g.player_count(); ++p) {
    if (static_cast<int>(g.available[p].size()) != g.state_count()) {
      r.add(Severity::error, "availability", "availability table size mismatch");
      return r;
    }
    for (int s = 0; s < g.state_count(); ++s) {
      const auto& av = g.available[p][s];
      if (av.empty())
        r.add(Severity::error, g.players[p] + "@" + g.states[s],
              "empty availability set");
      for (int a : av)
        if (a < 0 || a >= static_cast<int>(g.actions[p].size()))
          r.add(Severity::error, g.players[p] + "@" + g.states[s],
                "availability references unknown action");
    }
  }
  if (!r.ok) return r;

  if (static_cast<int>(g.transitions.size()) != g.state_count()) {
    r.add(Severity::error, "transitions", "transition table size mismatch");
    return r;
  }
  for (int s = 0; s < g.state_count(); ++s) {
    std::int64_t jc = g.joint_count(s);
    if (static_cast<std::int64_t>(g.transitions[s].size()) != jc) {
      r.add(Severity::error, g.states[s], "transition row size mismatch");
      continue;
    }
    for (std::int64_t j = 0; j < jc; ++j) {
      const auto& d = g.delta(s, j);
      std::string loc = g.states[s] + " " + joint_name(g, s, j);
      if (d.support.empty()) {
        r.add(Severity::error, loc, "missing transition for available joint action");
        continue;
      }
      std::vector<int> seen;
      for (const auto& e : d.support) {
        if (e.state < 0 || e.state >= g.state_count())
          r.add(Severity::error, loc, "successor out of range");
        if (e.prob < 0) r.add(Severity::error, loc, "negative probability");
        seen.push_back(e.state);
      }
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        r.add(Severity::error, loc, "duplicate successor in support");
      if (!d.sums_to_one())
        r.add(Severity::error, loc, "distribution sum != 1");
      if (g.is_target[s]) {
        bool self_loop = d.support.size() == 1 && d.support[0].state == s &&
                         d.support[0].prob == 1;
        if (!self_loop) r.add(Severity::error, loc, "target not absorbing");
      }
    }
  }
  return r;
}

namespace {

// Enumerates the full cartesian product of team alphabets, player 0 slowest.
std::vector<std::string> product_names(const Game& g, const std::vector<int>& members) {
  std::vector<std::string> out;
  std::vector<size_t> idx(members.size(), 0);
  if (members.empty()) return {"-"};
  while (true) {
    std::ostringstream os;
    for (size_t k = 0; k < members.size(); ++k) {
      if (k) os << "+";
      os << g.actions[members[k]][idx[k]];
    }
    out.push_back(os.str());
    int k = static_cast<int>(members.size()) - 1;
    while (k >= 0) {
      if (++idx[k] < g.actions[members[k]].size()) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

// Global product-alphabet index of a tuple of per-member action indices.
int product_index(const Game& g, const std::vector<int>& members,
                  const std::vector<int>& action_ids) {
  int code = 0;
  for (size_t k = 0; k < members.size(); ++k)
    code = code * static_cast<int>(g.actions[members[k]].size()) + action_ids[k];
  return code;
}

// Availability of the merged player at s: product of members' availability,
// as indices into the product alphabet (ascending by construction).
std::vector<int> product_availability(const Game& g, const std::vector<int>& members, int s) {
  std::vector<int> out;
  if (members.empty()) return {0};
  std::vector<size_t> pos(members.size(), 0);
  while (true) {
    std::vector<int> ids(members.size());
    for (size_t k = 0; k < members.size(); ++k)
      ids[k] = g.available[members[k]][s][pos[k]];
    out.push_back(product_index(g, members, ids));
    int k = static_cast<int>(members.size()) - 1;
    while (k >= 0) {
      if (++pos[k] < g.available[members[k]][s].size()) break;
      pos[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

}  // namespace

// Shared machinery: `team_members` become the new team (merged into one when
// merge_new_team, else kept separate); the remaining players are always merged
// into a single opponent.
static Game rebuild_coalition(const Game& g, const std::vector<int>& team_members,
                              bool merge_new_team) {
  std::vector<int> rest;
  for (int p = 0; p < g.player_count(); ++p)
    if (std::find(team_members.begin(), team_members.end(), p) == team_members.end())
      rest.push_back(p);

  Game out;
  out.states = g.states;
  out.is_target = g.is_target;
  out.initial = g.initial;
  out.labels = g.labels;

  if (merge_new_team) {
    std::string name;
    for (size_t k = 0; k < team_members.size(); ++k)
      name += (k ? "+" : "") + g.players[team_members[k]];
    out.players.push_back(name.empty() ? "-" : name);
    out.actions.push_back(product_names(g, team_members));
  } else {
    for (int p : team_members) {
      out.players.push_back(g.players[p]);
      out.actions.push_back(g.actions[p]);
    }
  }
  {
    std::string oname;
    for (size_t k = 0; k < rest.size(); ++k)
      oname += (k ? "+" : "") + g.players[rest[k]];
    out.players.push_back(oname.empty() ? "-" : oname);
    out.actions.push_back(product_names(g, rest));
  }

  int S = g.state_count();
  out.available.assign(out.players.size(), std::vector<std::vector<int>>(S));
  for (int s = 0; s < S; ++s) {
    if (merge_new_team) {
      out.available[0][s] = product_availability(g, team_members, s);
    } else {
      for (size_t k = 0; k < team_members.size(); ++k)
        out.available[k][s] = g.available[team_members[k]][s];
    }
    out.available[out.players.size() - 1][s] = product_availability(g, rest, s);
  }
  out.reserve_transitions();

  for (int s = 0; s < S; ++s) {
    std::int64_t jc = out.joint_count(s);
    for (std::int64_t j = 0; j < jc; ++j) {
      auto local = out.joint_decode(s, j);
      // Recover per-original-player local availability positions.
      std::vector<int> orig_local(static_cast<size_t>(g.player_count()));
      if (merge_new_team) {
        std::int64_t tcode = local[0];
        for (int k = static_cast<int>(team_members.size()) - 1; k >= 0; --k) {
          auto n = static_cast<std::int64_t>(g.available[team_members[k]][s].size());
          orig_local[team_members[k]] = static_cast<int>(tcode % n);
          tcode /= n;
        }
      } else {
        for (size_t k = 0; k < team_members.size(); ++k)
          orig_local[team_members[k]] = local[k];
      }
      std::int64_t ocode = local.back();
      for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
        auto n = static_cast<std::int64_t>(g.available[rest[k]][s].size());
        orig_local[rest[k]] = static_cast<int>(ocode % n);
        ocode /= n;
      }
      out.set_delta(s, j, g.delta(s, g.joint_code(s, orig_local)));
    }
  }
  return out;
}

Game merge_team(const Game& g) {
  std::vector<int> team(static_cast<size_t>(g.team_size()));
  for (int p = 0; p < g.team_size(); ++p) team[static_cast<size_t>(p)] = p;
  return rebuild_coalition(g, team, /*merge_new_team=*/true);
}

Game set_coalition(const Game& g, const std::vector<int>& coalition) {
  for (int p : coalition)
    if (p < 0 || p >= g.player_count())
      throw std::invalid_argument("coalition references unknown player");
  return rebuild_coalition(g, coalition, /*merge_new_team=*/false);
}

Game restrict_absorbing(const Game& g, const std::vector<int>& keep) {
  std::vector<bool> in_keep(static_cast<size_t>(g.state_count()), false);
  for (int s : keep) {
    if (s < 0 || s >= g.state_count())
      throw std::invalid_argument("keep contains unknown state id");
    in_keep[static_cast<size_t>(s)] = true;
  }
  Game out = g;
  for (int s = 0; s < g.state_count(); ++s) {
    if (in_keep[static_cast<size_t>(s)]) continue;
    std::int64_t jc = out.joint_count(s);
    for (std::int64_t j = 0; j < jc; ++j) out.set_delta(s, j, dirac(s));
  }
  return out;
}

Game absorbing_closure(const Game& g) {
  Game out = g;
  for (int s = 0; s < g.state_count(); ++s) {
    if (!g.is_target[s]) continue;
    std::int64_t jc = out.joint_count(s);
    for (std::int64_t j = 0; j < jc; ++j) out.set_delta(s, j, dirac(s));
  }
  return out;
}

MemorylessProfile MemorylessProfile::uniform(const Game& g) {
  MemorylessProfile mp;
  mp.probs.resize(static_cast<size_t>(g.team_size()));
  for (int p = 0; p < g.team_size(); ++p) {
    mp.probs[p].resize(static_cast<size_t>(g.state_count()));
    for (int s = 0; s < g.state_count(); ++s) {
      size_t n = g.available[p][s].size();
      mp.probs[p][s].assign(n, Rational(1, static_cast<int>(n)));
    }
  }
  return mp;
}

bool MemorylessProfile::valid_for(const Game& g, std::string* why) const {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (static_cast<int>(probs.size()) != g.team_size())
    return fail("profile player count mismatch");
  for (int p = 0; p < g.team_size(); ++p) {
    if (static_cast<int>(probs[p].size()) != g.state_count())
      return fail("profile state count mismatch");
    for (int s = 0; s < g.state_count(); ++s) {
      const auto& v = probs[p][s];
      if (v.size() != g.available[p][s].size())
        return fail("profile references unavailable action at " + g.states[s]);
      Rational sum = 0;
      for (const auto& q : v) {
        if (q < 0) return fail("negative profile probability at " + g.states[s]);
        sum += q;
      }
      if (sum != 1) return fail("profile distribution sum != 1 at " + g.states[s]);
    }
  }
  return true;
}

Game induced_mdp(const Game& g, const MemorylessProfile& profile) {
  std::string why;
  if (!profile.valid_for(g, &why)) throw std::invalid_argument(why);

  int opp = g.opponent();
  Game out;
  out.players = {g.players[opp]};
  out.actions = {g.actions[opp]};
  out.states = g.states;
  out.is_target = g.is_target;
  out.initial = g.initial;
  out.labels = g.labels;
  out.available.assign(1, std::vector<std::vector<int>>(g.state_count()));
  for (int s = 0; s < g.state_count(); ++s)
    out.available[0][s] = g.available[opp][s];
  out.reserve_transitions();

  for (int s = 0; s < g.state_count(); ++s) {
    std::int64_t tc = g.team_joint_count(s);
    auto nopp = static_cast<std::int64_t>(g.available[opp][s].size());
    for (std::int64_t b = 0; b < nopp; ++b) {
      Distribution mix;
      for (std::int64_t t = 0; t < tc; ++t) {
        // Team part of the joint code is the slow digits; opponent fastest.
        std::int64_t code = t * nopp + b;
        auto local = g.joint_decode(s, code);
        Rational w = 1;
        for (int p = 0; p < g.team_size(); ++p) w *= profile.probs[p][s][local[p]];
        if (w == 0) continue;
        for (const auto& e : g.delta(s, code).support)
          mix.add(e.state, w * e.prob);
      }
      mix.normalize_support();
      out.set_delta(s, b, std::move(mix));
    }
  }
  return out;
}

}  // namespace tg
