#include "tg/bench_gen.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tg {

std::int64_t transition_count(const Game& g) {
  std::int64_t n = 0;
  for (int s = 0; s < g.state_count(); ++s) n += g.joint_count(s);
  return n;
}

namespace {

std::string join_ids(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "_" : "") + std::to_string(v[i]);
  return out;
}

void make_absorbing(Game& g, int s) {
  std::int64_t jc = g.joint_count(s);
  for (std::int64_t j = 0; j < jc; ++j) g.set_delta(s, j, dirac(s));
}

}  // namespace

Game gen_pursuit(const Digraph& graph, const std::vector<int>& team_starts,
                 int pursuer_start) {
  int n = graph.nodes;
  if (n <= 0) throw std::invalid_argument("empty graph");
  int k = static_cast<int>(team_starts.size());
  if (k < 1) throw std::invalid_argument("team must be non-empty");
  for (int u : team_starts)
    if (u < 0 || u >= n) throw std::invalid_argument("team start outside graph");
  if (pursuer_start < 0 || pursuer_start >= n)
    throw std::invalid_argument("pursuer start outside graph");

  // Closed neighbourhood: out-edges plus waiting in place.
  std::vector<std::vector<int>> nbhd(static_cast<size_t>(n));
  for (int u = 0; u < n; ++u) nbhd[static_cast<size_t>(u)].push_back(u);
  for (auto [u, v] : graph.edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("edge outside graph");
    nbhd[static_cast<size_t>(u)].push_back(v);
  }
  for (auto& nb : nbhd) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  Game g;
  for (int p = 1; p <= k; ++p) g.players.push_back("p" + std::to_string(p));
  g.players.push_back("O");
  std::vector<std::string> alphabet;
  for (int u = 0; u < n; ++u) alphabet.push_back("n" + std::to_string(u));
  g.actions.assign(g.players.size(), alphabet);

  // States: position vectors, player 0 slowest.
  std::int64_t S = 1;
  for (int p = 0; p <= k; ++p) S *= n;
  auto decode = [&](std::int64_t id) {
    std::vector<int> pos(static_cast<size_t>(k) + 1);
    for (int p = k; p >= 0; --p) {
      pos[static_cast<size_t>(p)] = static_cast<int>(id % n);
      id /= n;
    }
    return pos;
  };
  auto encode = [&](const std::vector<int>& pos) {
    std::int64_t id = 0;
    for (int p = 0; p <= k; ++p) id = id * n + pos[static_cast<size_t>(p)];
    return static_cast<int>(id);
  };

  g.is_target.assign(static_cast<size_t>(S), false);
  std::vector<bool> capture(static_cast<size_t>(S), false);
  for (std::int64_t id = 0; id < S; ++id) {
    auto pos = decode(id);
    g.states.push_back(join_ids(pos));
    bool caught = false;
    for (int p = 0; p < k; ++p)
      if (pos[static_cast<size_t>(p)] == pos[static_cast<size_t>(k)]) caught = true;
    capture[static_cast<size_t>(id)] = caught;
    if (caught) continue;  // capture strictly takes precedence
    bool together = true;
    for (int p = 1; p < k; ++p)
      if (pos[static_cast<size_t>(p)] != pos[0]) together = false;
    if (together) g.is_target[static_cast<size_t>(id)] = true;
  }

  g.available.assign(g.players.size(), std::vector<std::vector<int>>(static_cast<size_t>(S)));
  for (std::int64_t id = 0; id < S; ++id) {
    auto pos = decode(id);
    for (int p = 0; p <= k; ++p)
      g.available[static_cast<size_t>(p)][static_cast<size_t>(id)] =
          nbhd[static_cast<size_t>(pos[static_cast<size_t>(p)])];
  }
  g.reserve_transitions();

  for (std::int64_t id = 0; id < S; ++id) {
    if (capture[static_cast<size_t>(id)] || g.is_target[static_cast<size_t>(id)]) {
      make_absorbing(g, static_cast<int>(id));
      continue;
    }
    std::int64_t jc = g.joint_count(static_cast<int>(id));
    for (std::int64_t j = 0; j < jc; ++j) {
      auto local = g.joint_decode(static_cast<int>(id), j);
      std::vector<int> next(static_cast<size_t>(k) + 1);
      for (int p = 0; p <= k; ++p)
        next[static_cast<size_t>(p)] =
            g.available[static_cast<size_t>(p)][static_cast<size_t>(id)]
                       [static_cast<size_t>(local[static_cast<size_t>(p)])];
      g.set_delta(static_cast<int>(id), j, dirac(encode(next)));
    }
  }

  std::vector<int> start(team_starts);
  start.push_back(pursuer_start);
  g.initial = encode(start);
  g.labels.assign(static_cast<size_t>(S), {});
  return g;
}

Game pursuit_scenario(int scenario) {
  Digraph gr;
  std::vector<int> team;
  int opp = 0;
  switch (scenario) {
    case 1:
      gr = {3, {{0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};
      team = {0, 1};
      opp = 2;
      break;
    case 2:
      gr = {4, {{0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 3}, {3, 0}, {3, 2}}};
      team = {1, 3};
      opp = 2;
      break;
    case 3:
      gr = {4, {{1, 0}, {1, 2}, {2, 0}, {3, 0}, {3, 2}}};
      team = {1, 3};
      opp = 2;
      break;
    case 4:
      gr = {5, {{0, 3}, {0, 4}, {1, 3}, {1, 4}, {2, 3}, {2, 4}}};
      team = {0, 2};
      opp = 1;
      break;
    case 5:
      gr.nodes = 4;
      for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v)
          if (u != v) gr.edges.push_back({u, v});
      team = {0, 1, 2};
      opp = 3;
      break;
    case 6:
      gr.nodes = 6;
      for (int u = 0; u < 4; ++u) {
        gr.edges.push_back({u, 4});
        gr.edges.push_back({u, 5});
      }
      team = {0, 1, 2};
      opp = 3;
      break;
    default:
      throw std::invalid_argument("unknown pursuit scenario");
  }
  return gen_pursuit(gr, team, opp);
}

Game gen_robot(int height, int width, const std::vector<std::pair<int, int>>& starts,
               const std::vector<std::pair<int, int>>& goal_cells) {
  if (height < 1 || width < 1) throw std::invalid_argument("empty grid");
  int k = static_cast<int>(starts.size());
  if (k < 1) throw std::invalid_argument("no robots");
  if (goal_cells.empty() || goal_cells.size() > starts.size())
    throw std::invalid_argument("need between 1 and k goal cells");
  int cells = height * width;
  auto cell_id = [&](std::pair<int, int> c) {
    auto [x, y] = c;
    if (x < 0 || x >= width || y < 0 || y >= height)
      throw std::invalid_argument("cell outside grid");
    return y * width + x;
  };
  auto distinct = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  std::vector<int> start_ids, goal_ids;
  for (auto c : starts) start_ids.push_back(cell_id(c));
  for (auto c : goal_cells) goal_ids.push_back(cell_id(c));
  if (!distinct(start_ids)) throw std::invalid_argument("start cells collide");
  if (!distinct(goal_ids)) throw std::invalid_argument("goal cells repeat");

  // Action/wind order: N,S,E,W then Wait/Calm.
  const std::vector<std::string> team_acts = {"N", "S", "E", "W", "Wait"};
  const std::vector<std::string> opp_acts = {"N", "S", "E", "W", "Calm"};
  auto moved = [&](int cell, int dir) {  // clamped one-step move
    int x = cell % width, y = cell / width;
    if (dir == 0) y = std::min(y + 1, height - 1);
    if (dir == 1) y = std::max(y - 1, 0);
    if (dir == 2) x = std::min(x + 1, width - 1);
    if (dir == 3) x = std::max(x - 1, 0);
    return y * width + x;
  };

  std::int64_t S = 1;
  for (int p = 0; p < k; ++p) S *= cells;
  auto decode = [&](std::int64_t id) {
    std::vector<int> pos(static_cast<size_t>(k));
    for (int p = k - 1; p >= 0; --p) {
      pos[static_cast<size_t>(p)] = static_cast<int>(id % cells);
      id /= cells;
    }
    return pos;
  };
  auto encode = [&](const std::vector<int>& pos) {
    std::int64_t id = 0;
    for (int p = 0; p < k; ++p) id = id * cells + pos[static_cast<size_t>(p)];
    return static_cast<int>(id);
  };

  Game g;
  for (int p = 1; p <= k; ++p) g.players.push_back("r" + std::to_string(p));
  g.players.push_back("wind");
  for (int p = 0; p < k; ++p) g.actions.push_back(team_acts);
  g.actions.push_back(opp_acts);

  int loss_state = 0;  // every robot on cell 0: the canonical loss configuration
  g.is_target.assign(static_cast<size_t>(S), false);
  std::vector<bool> dead(static_cast<size_t>(S), false);
  for (std::int64_t id = 0; id < S; ++id) {
    auto pos = decode(id);
    g.states.push_back(join_ids(pos));
    if (id == loss_state || !distinct(pos)) {
      dead[static_cast<size_t>(id)] = true;
      continue;
    }
    bool covered = true;
    for (int goal : goal_ids)
      if (std::find(pos.begin(), pos.end(), goal) == pos.end()) covered = false;
    g.is_target[static_cast<size_t>(id)] = covered;
  }

  g.available.assign(g.players.size(), std::vector<std::vector<int>>(static_cast<size_t>(S)));
  for (std::int64_t id = 0; id < S; ++id)
    for (size_t p = 0; p < g.players.size(); ++p) {
      g.available[p][static_cast<size_t>(id)].resize(5);
      for (int a = 0; a < 5; ++a) g.available[p][static_cast<size_t>(id)][static_cast<size_t>(a)] = a;
    }
  g.reserve_transitions();

  const Rational half(1, 2);
  for (std::int64_t id = 0; id < S; ++id) {
    if (dead[static_cast<size_t>(id)] || g.is_target[static_cast<size_t>(id)]) {
      make_absorbing(g, static_cast<int>(id));
      continue;
    }
    auto pos = decode(id);
    std::int64_t jc = g.joint_count(static_cast<int>(id));
    for (std::int64_t j = 0; j < jc; ++j) {
      auto local = g.joint_decode(static_cast<int>(id), j);
      int wind = local[static_cast<size_t>(k)];
      // Per-robot outcome list: (cell, is_split).
      std::vector<std::vector<int>> dests(static_cast<size_t>(k));
      for (int p = 0; p < k; ++p) {
        int a = local[static_cast<size_t>(p)];
        int here = pos[static_cast<size_t>(p)];
        if (wind == 4) {  // calm
          dests[static_cast<size_t>(p)] = {a == 4 ? here : moved(here, a)};
        } else if (a == 4) {  // waiting in wind: pushed
          dests[static_cast<size_t>(p)] = {moved(here, wind)};
        } else if (a == wind) {  // tailwind
          dests[static_cast<size_t>(p)] = {moved(here, a)};
        } else {  // headwind or crosswind
          dests[static_cast<size_t>(p)] = {moved(here, a), moved(here, wind)};
        }
      }
      Distribution d;
      d.add(loss_state, half);  // per-round termination mass
      std::vector<size_t> idx(static_cast<size_t>(k), 0);
      for (;;) {
        Rational w = half;
        std::vector<int> next(static_cast<size_t>(k));
        for (int p = 0; p < k; ++p) {
          const auto& opts = dests[static_cast<size_t>(p)];
          next[static_cast<size_t>(p)] = opts[idx[static_cast<size_t>(p)]];
          if (opts.size() == 2) w *= half;
        }
        d.add(encode(next), w);
        int p = k - 1;
        while (p >= 0) {
          if (++idx[static_cast<size_t>(p)] < dests[static_cast<size_t>(p)].size()) break;
          idx[static_cast<size_t>(p)] = 0;
          --p;
        }
        if (p < 0) break;
      }
      d.normalize_support();
      g.set_delta(static_cast<int>(id), j, std::move(d));
    }
  }

  g.initial = encode(start_ids);
  if (dead[static_cast<size_t>(g.initial)])
    throw std::invalid_argument("initial configuration collides");
  g.labels.assign(static_cast<size_t>(S), {});
  return g;
}

Game robot_scenario(int scenario) {
  switch (scenario) {
    case 1:
      return gen_robot(2, 2, {{0, 0}, {1, 1}}, {{1, 0}});
    case 2:
      return gen_robot(2, 3, {{0, 0}, {1, 1}}, {{2, 0}});
    case 3:
      return gen_robot(3, 3, {{1, 2}, {0, 1}}, {{2, 0}});
    case 4:
      return gen_robot(4, 3, {{1, 3}, {0, 2}}, {{2, 0}});
    default:
      throw std::invalid_argument("unknown robot scenario");
  }
}

Game gen_jamming(int channels, const std::vector<int>& buffers) {
  if (channels < 1) throw std::invalid_argument("need at least one channel");
  int k = static_cast<int>(buffers.size());
  if (k < 1) throw std::invalid_argument("no sensors");
  for (int b : buffers)
    if (b < 1) throw std::invalid_argument("buffer sizes must be positive");

  std::int64_t S = 1;
  for (int b : buffers) S *= b + 1;
  int sink = static_cast<int>(S);  // one extra absorbing loss state

  auto decode = [&](std::int64_t id) {
    std::vector<int> b(static_cast<size_t>(k));
    for (int p = k - 1; p >= 0; --p) {
      b[static_cast<size_t>(p)] = static_cast<int>(id % (buffers[static_cast<size_t>(p)] + 1));
      id /= buffers[static_cast<size_t>(p)] + 1;
    }
    return b;
  };
  auto encode = [&](const std::vector<int>& b) {
    std::int64_t id = 0;
    for (int p = 0; p < k; ++p)
      id = id * (buffers[static_cast<size_t>(p)] + 1) + b[static_cast<size_t>(p)];
    return static_cast<int>(id);
  };

  Game g;
  for (int p = 1; p <= k; ++p) g.players.push_back("x" + std::to_string(p));
  g.players.push_back("jammer");
  std::vector<std::string> team_acts, opp_acts;
  for (int c = 1; c <= channels; ++c) {
    team_acts.push_back("c" + std::to_string(c));
    opp_acts.push_back("c" + std::to_string(c));
  }
  team_acts.push_back("wait");
  opp_acts.push_back("idle");
  for (int p = 0; p < k; ++p) g.actions.push_back(team_acts);
  g.actions.push_back(opp_acts);

  for (std::int64_t id = 0; id < S; ++id) g.states.push_back(join_ids(decode(id)));
  g.states.push_back("sink");
  g.is_target.assign(static_cast<size_t>(S) + 1, false);
  g.is_target[static_cast<size_t>(encode(std::vector<int>(static_cast<size_t>(k), 0)))] = true;

  int total_states = static_cast<int>(S) + 1;
  g.available.assign(g.players.size(), std::vector<std::vector<int>>(static_cast<size_t>(total_states)));
  for (int s = 0; s < total_states; ++s)
    for (size_t p = 0; p < g.players.size(); ++p) {
      int count = static_cast<int>(g.actions[p].size());
      for (int a = 0; a < count; ++a) g.available[p][static_cast<size_t>(s)].push_back(a);
    }
  g.reserve_transitions();

  for (int s = 0; s < total_states; ++s) {
    if (s == sink || g.is_target[static_cast<size_t>(s)]) {
      make_absorbing(g, s);
      continue;
    }
    auto b = decode(s);
    std::int64_t jc = g.joint_count(s);
    for (std::int64_t j = 0; j < jc; ++j) {
      auto local = g.joint_decode(s, j);
      int jam = local[static_cast<size_t>(k)];  // channel index or `channels` = idle
      bool lost = false;
      std::vector<int> nb = b;
      for (int p = 0; p < k && !lost; ++p) {
        int a = local[static_cast<size_t>(p)];
        if (a == channels) continue;  // wait
        bool jammed = jam == a;
        bool collision = false;
        for (int q = 0; q < k; ++q)
          if (q != p && local[static_cast<size_t>(q)] == a) collision = true;
        if (jammed || collision)
          lost = true;
        else if (nb[static_cast<size_t>(p)] > 0)
          --nb[static_cast<size_t>(p)];
      }
      g.set_delta(s, j, dirac(lost ? sink : encode(nb)));
    }
  }

  g.initial = encode(buffers);
  g.labels.assign(static_cast<size_t>(total_states), {});
  return g;
}

Game gen_clique(int vertices, const std::vector<std::pair<int, int>>& edges, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (vertices < 1) throw std::invalid_argument("empty graph");
  std::set<std::pair<int, int>> edge_set;
  for (auto [u, v] : edges) {
    if (u < 0 || u >= vertices || v < 0 || v >= vertices || u == v)
      throw std::invalid_argument("bad edge");
    edge_set.insert({u, v});
    edge_set.insert({v, u});
  }

  Game g;
  g.players = {"1", "2", "O"};
  g.states = {"s", "win", "lose"};
  g.initial = 0;
  g.is_target = {false, true, false};
  g.labels = {{}, {"goal"}, {}};

  std::vector<std::string> claim;
  for (int i = 1; i <= k; ++i)
    for (int v = 0; v < vertices; ++v)
      claim.push_back("i" + std::to_string(i) + "v" + std::to_string(v));
  std::vector<std::string> challenge;
  for (int i = 1; i <= k; ++i)
    for (int jx = 1; jx <= k; ++jx)
      challenge.push_back("q" + std::to_string(i) + "_" + std::to_string(jx));
  g.actions = {claim, claim, challenge};

  g.available.assign(3, std::vector<std::vector<int>>(3));
  for (int s = 0; s < 3; ++s)
    for (int p = 0; p < 3; ++p) {
      int count = static_cast<int>(g.actions[static_cast<size_t>(p)].size());
      for (int a = 0; a < count; ++a) g.available[static_cast<size_t>(p)][static_cast<size_t>(s)].push_back(a);
    }
  g.reserve_transitions();
  make_absorbing(g, 1);
  make_absorbing(g, 2);

  std::int64_t jc = g.joint_count(0);
  for (std::int64_t j = 0; j < jc; ++j) {
    auto local = g.joint_decode(0, j);
    int i1 = local[0] / vertices + 1, u = local[0] % vertices;
    int i2 = local[1] / vertices + 1, v = local[1] % vertices;
    int qi = local[2] / k + 1, qj = local[2] % k + 1;
    int succ;
    if (i1 != qi || i2 != qj) {
      succ = 0;  // index check fails: loop
    } else if (qi == qj) {
      succ = u == v ? 1 : 2;
    } else {
      succ = edge_set.count({u, v}) ? 1 : 2;
    }
    g.set_delta(0, j, dirac(succ));
  }
  return g;
}

Game builtin(const std::string& name) {
  if (name == "door-merged") return merge_team(builtin("door"));
  if (name == "door") {
    Game g;
    g.players = {"1", "2", "O"};
    g.states = {"s0", "goal", "fail"};
    g.initial = 0;
    g.is_target = {false, true, false};
    g.labels = {{"init"}, {"goal"}, {"fail"}};
    g.actions.assign(3, {"L", "R"});
    g.available.assign(3, std::vector<std::vector<int>>(3, {0, 1}));
    g.reserve_transitions();
    make_absorbing(g, 1);
    make_absorbing(g, 2);
    for (std::int64_t j = 0; j < 8; ++j) {
      auto local = g.joint_decode(0, j);
      int succ;
      if (local[0] != local[1])
        succ = 2;
      else if (local[0] == local[2])
        succ = 1;
      else
        succ = 0;
      g.set_delta(0, j, dirac(succ));
    }
    return g;
  }
  if (name == "memory") {
    Game g;
    g.players = {"P1", "P2", "O"};
    g.states = {"S", "Sa", "Sb", "top", "bot"};
    g.initial = 0;
    g.is_target = {false, false, false, true, false};
    g.labels = {{}, {}, {}, {"goal"}, {}};
    g.actions = {{"a", "b", "wait"}, {"a", "b"}, {"a", "b"}};
    g.available.assign(3, std::vector<std::vector<int>>(5));
    for (int s = 0; s < 5; ++s) {
      g.available[0][s] = {0, 1, 2};
      g.available[1][s] = {0, 1};
      g.available[2][s] = {0, 1};
    }
    g.reserve_transitions();
    make_absorbing(g, 3);
    make_absorbing(g, 4);
    for (int s : {1, 2}) {  // memory states always return to S
      std::int64_t jc = g.joint_count(s);
      for (std::int64_t j = 0; j < jc; ++j) g.set_delta(s, j, dirac(0));
    }
    std::int64_t jc = g.joint_count(0);
    for (std::int64_t j = 0; j < jc; ++j) {
      auto local = g.joint_decode(0, j);
      int succ;
      if (local[0] == 2)
        succ = local[2] == 0 ? 1 : 2;  // wait: opponent reveals a letter
      else if (local[0] == local[1] && local[0] == local[2])
        succ = 3;
      else
        succ = 4;
      g.set_delta(0, j, dirac(succ));
    }
    return g;
  }
  throw std::invalid_argument("unknown builtin game \"" + name + "\"");
}

}  // namespace tg
