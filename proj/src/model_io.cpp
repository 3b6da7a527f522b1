#include "tg/model_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tg {

using nlohmann::json;  // object keys sorted -> canonical output for free

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

const json& need(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field \"" + key + "\"");
  return *it;
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) fail(path, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Rational parse_prob(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "probability must be a string literal");
  auto r = parse_rational(j.get<std::string>());
  if (!r) fail(path, "malformed probability \"" + j.get<std::string>() + "\"");
  return *r;
}

// Joint-action key: action names in player order, joined by ",".
std::string joint_key(const Game& g, int s, std::int64_t code) {
  auto local = g.joint_decode(s, code);
  std::string key;
  for (int p = 0; p < g.player_count(); ++p) {
    if (p) key += ",";
    key += g.actions[p][g.available[p][s][local[p]]];
  }
  return key;
}

}  // namespace

Game parse_game(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("document: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "top level must be an object");
  const auto& ver = need(doc, "version", "document");
  if (!ver.is_number_integer() || ver.get<int>() != 1)
    fail("version", "unsupported document version");

  Game g;
  auto players = string_list(need(doc, "players", "document"), "players");
  if (players.empty()) fail("players", "empty player list");
  const auto& oppj = need(doc, "opponent", "document");
  if (!oppj.is_string()) fail("opponent", "must be a player name");
  std::string opp = oppj.get<std::string>();
  // Canonical player order: team in document order, opponent last.
  bool seen_opp = false;
  for (const auto& p : players) {
    if (p == opp) {
      seen_opp = true;
      continue;
    }
    g.players.push_back(p);
  }
  if (!seen_opp) fail("opponent", "\"" + opp + "\" is not a listed player");
  g.players.push_back(opp);
  if (std::set<std::string>(players.begin(), players.end()).size() != players.size())
    fail("players", "duplicate player name");

  g.states = string_list(need(doc, "states", "document"), "states");
  if (g.states.empty()) fail("states", "empty state list");
  if (std::set<std::string>(g.states.begin(), g.states.end()).size() != g.states.size())
    fail("states", "duplicate state name");

  const auto& actions = need(doc, "actions", "document");
  if (!actions.is_object()) fail("actions", "expected an object");
  g.actions.resize(g.players.size());
  for (int p = 0; p < g.player_count(); ++p) {
    auto it = actions.find(g.players[p]);
    if (it == actions.end()) fail("actions", "no alphabet for player " + g.players[p]);
    g.actions[p] = string_list(*it, "actions." + g.players[p]);
    if (g.actions[p].empty()) fail("actions." + g.players[p], "empty alphabet");
  }

  const auto& initj = need(doc, "initial", "document");
  if (!initj.is_string() || (g.initial = g.state_index(initj.get<std::string>())) < 0)
    fail("initial", "unknown state");

  g.is_target.assign(g.states.size(), false);
  for (const auto& t : string_list(need(doc, "targets", "document"), "targets")) {
    int s = g.state_index(t);
    if (s < 0) fail("targets", "unknown state \"" + t + "\"");
    g.is_target[s] = true;
  }

  g.labels.assign(g.states.size(), {});
  if (doc.contains("labels")) {
    const auto& labels = doc["labels"];
    if (!labels.is_object()) fail("labels", "expected an object");
    for (auto it = labels.begin(); it != labels.end(); ++it) {
      int s = g.state_index(it.key());
      if (s < 0) fail("labels", "unknown state \"" + it.key() + "\"");
      g.labels[s] = string_list(it.value(), "labels." + it.key());
      std::sort(g.labels[s].begin(), g.labels[s].end());
    }
  }

  const auto& avail = need(doc, "availability", "document");
  if (!avail.is_object()) fail("availability", "expected an object");
  g.available.assign(g.players.size(), std::vector<std::vector<int>>(g.states.size()));
  for (int p = 0; p < g.player_count(); ++p) {
    auto pit = avail.find(g.players[p]);
    if (pit == avail.end()) fail("availability", "no entry for player " + g.players[p]);
    const std::string ppath = "availability." + g.players[p];
    if (!pit->is_object()) fail(ppath, "expected an object");
    for (int s = 0; s < g.state_count(); ++s) {
      auto sit = pit->find(g.states[s]);
      if (sit == pit->end()) fail(ppath, "no entry for state " + g.states[s]);
      const std::string spath = ppath + "." + g.states[s];
      std::vector<int> ids;
      for (const auto& name : string_list(*sit, spath)) {
        int a = g.action_index(p, name);
        if (a < 0) fail(spath, "unknown action \"" + name + "\"");
        ids.push_back(a);
      }
      std::sort(ids.begin(), ids.end());
      if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        fail(spath, "duplicate action");
      if (ids.empty()) fail(spath, "empty availability set");
      g.available[p][s] = std::move(ids);
    }
  }
  g.reserve_transitions();

  const auto& trans = need(doc, "transitions", "document");
  if (!trans.is_object()) fail("transitions", "expected an object");
  for (auto sit = trans.begin(); sit != trans.end(); ++sit) {
    int s = g.state_index(sit.key());
    if (s < 0) fail("transitions", "unknown state \"" + sit.key() + "\"");
    const std::string spath = "transitions." + sit.key();
    if (!sit->is_object()) fail(spath, "expected an object");
    for (auto jit = sit->begin(); jit != sit->end(); ++jit) {
      const std::string jpath = spath + "." + jit.key();
      // Split the key into per-player action names and resolve to a code.
      std::vector<std::string> parts;
      std::stringstream ss(jit.key());
      std::string part;
      while (std::getline(ss, part, ',')) parts.push_back(part);
      if (static_cast<int>(parts.size()) != g.player_count())
        fail(jpath, "joint action arity mismatch");
      std::vector<int> local(parts.size());
      for (int p = 0; p < g.player_count(); ++p) {
        int a = g.action_index(p, parts[p]);
        if (a < 0) fail(jpath, "unknown action \"" + parts[p] + "\"");
        const auto& av = g.available[p][s];
        auto pos = std::find(av.begin(), av.end(), a);
        if (pos == av.end()) fail(jpath, "action \"" + parts[p] + "\" unavailable here");
        local[p] = static_cast<int>(pos - av.begin());
      }
      if (!jit->is_array()) fail(jpath, "expected an array of [state, prob] pairs");
      Distribution d;
      for (const auto& e : *jit) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string())
          fail(jpath, "expected [state, prob] pairs");
        int t = g.state_index(e[0].get<std::string>());
        if (t < 0) fail(jpath, "unknown successor \"" + e[0].get<std::string>() + "\"");
        d.add(t, parse_prob(e[1], jpath));
      }
      d.normalize_support();
      g.set_delta(s, g.joint_code(s, local), std::move(d));
    }
  }

  auto report = validate(g);
  if (!report.ok) throw ParseError("validation failed:\n" + report.to_string());
  return g;
}

std::string serialize_game(const Game& g) {
  json doc;
  doc["version"] = 1;
  doc["players"] = g.players;
  doc["opponent"] = g.players[g.opponent()];
  doc["states"] = g.states;
  doc["initial"] = g.states[g.initial];
  json targets = json::array();
  for (int s = 0; s < g.state_count(); ++s)
    if (g.is_target[s]) targets.push_back(g.states[s]);
  doc["targets"] = std::move(targets);

  json actions = json::object();
  json avail = json::object();
  for (int p = 0; p < g.player_count(); ++p) {
    actions[g.players[p]] = g.actions[p];
    json per_state = json::object();
    for (int s = 0; s < g.state_count(); ++s) {
      json names = json::array();
      for (int a : g.available[p][s]) names.push_back(g.actions[p][a]);
      per_state[g.states[s]] = std::move(names);
    }
    avail[g.players[p]] = std::move(per_state);
  }
  doc["actions"] = std::move(actions);
  doc["availability"] = std::move(avail);

  bool any_label = false;
  json labels = json::object();
  for (int s = 0; s < g.state_count(); ++s) {
    if (g.labels.empty() || g.labels[s].empty()) continue;
    auto sorted = g.labels[s];
    std::sort(sorted.begin(), sorted.end());
    labels[g.states[s]] = sorted;
    any_label = true;
  }
  if (any_label) doc["labels"] = std::move(labels);

  json trans = json::object();
  for (int s = 0; s < g.state_count(); ++s) {
    json row = json::object();
    std::int64_t jc = g.joint_count(s);
    for (std::int64_t j = 0; j < jc; ++j) {
      json entries = json::array();
      for (const auto& e : g.delta(s, j).support)
        entries.push_back({g.states[e.state], rational_to_string(e.prob)});
      row[joint_key(g, s, j)] = std::move(entries);
    }
    trans[g.states[s]] = std::move(row);
  }
  doc["transitions"] = std::move(trans);
  return doc.dump(2) + "\n";
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_game(ss.str());
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << text;
}

std::string format_valuation(const Game& g, const std::vector<double>& v) {
  std::string out;
  char buf[64];
  for (int s = 0; s < g.state_count(); ++s) {
    std::snprintf(buf, sizeof buf, "%s %.6f\n", g.states[s].c_str(), v[s]);
    out += buf;
  }
  return out;
}

std::string serialize_profile(const Game& g, const MemorylessProfile& mp) {
  json prof = json::object();
  for (int p = 0; p < g.team_size(); ++p) {
    json per_state = json::object();
    for (int s = 0; s < g.state_count(); ++s) {
      json dist = json::object();
      for (size_t k = 0; k < g.available[p][s].size(); ++k)
        dist[g.actions[p][g.available[p][s][k]]] =
            rational_to_string(mp.probs[p][s][k]);
      per_state[g.states[s]] = std::move(dist);
    }
    prof[g.players[p]] = std::move(per_state);
  }
  json doc;
  doc["version"] = 1;
  doc["profile"] = std::move(prof);
  return doc.dump(2) + "\n";
}

MemorylessProfile parse_profile(const Game& g, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("profile: ") + e.what());
  }
  const auto& prof = need(doc, "profile", "profile");
  MemorylessProfile mp;
  mp.probs.resize(static_cast<size_t>(g.team_size()));
  for (int p = 0; p < g.team_size(); ++p) {
    auto pit = prof.find(g.players[p]);
    if (pit == prof.end()) fail("profile", "no entry for player " + g.players[p]);
    mp.probs[p].resize(static_cast<size_t>(g.state_count()));
    for (int s = 0; s < g.state_count(); ++s) {
      auto sit = pit->find(g.states[s]);
      if (sit == pit->end())
        fail("profile." + g.players[p], "no entry for state " + g.states[s]);
      const auto& av = g.available[p][s];
      std::vector<Rational> dist(av.size(), Rational(0));
      for (auto ait = sit->begin(); ait != sit->end(); ++ait) {
        int a = g.action_index(p, ait.key());
        auto pos = std::find(av.begin(), av.end(), a);
        if (a < 0 || pos == av.end())
          fail("profile." + g.players[p] + "." + g.states[s],
               "action \"" + ait.key() + "\" unavailable");
        dist[static_cast<size_t>(pos - av.begin())] =
            parse_prob(ait.value(), "profile");
      }
      mp.probs[p][s] = std::move(dist);
    }
  }
  std::string why;
  if (!mp.valid_for(g, &why)) throw ParseError("profile: " + why);
  return mp;
}

std::string serialize_certificate(const Game& g, const RankCertificate& c) {
  json doc;
  doc["version"] = 1;
  json winning = json::array();
  json ranks = json::object();
  for (int s : c.winning) {
    winning.push_back(g.states[s]);
    ranks[g.states[s]] = c.rank[s];
  }
  doc["winning"] = std::move(winning);
  doc["ranks"] = std::move(ranks);
  json supports = json::object();
  for (int p = 0; p < g.team_size(); ++p) {
    json per_state = json::object();
    for (int s : c.winning) {
      json acts = json::array();
      for (int a : c.supports[p][s]) acts.push_back(g.actions[p][a]);
      per_state[g.states[s]] = std::move(acts);
    }
    supports[g.players[p]] = std::move(per_state);
  }
  doc["supports"] = std::move(supports);
  return doc.dump(2) + "\n";
}

}  // namespace tg
