// End-to-end acceptance gate. Each criterion prints exactly one verdict line
// so the suite can be audited from the test log alone.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tg/almost_sure.hpp"
#include "tg/bench_gen.hpp"
#include "tg/iratl.hpp"
#include "tg/model_io.hpp"
#include "tg/one_shot.hpp"
#include "tg/sat_solver.hpp"
#include "tg/smt_bridge.hpp"
#include "tg/threshold_vi.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

using namespace tg;

namespace {

void report(int n, bool ok) {
  std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion " << n);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

double initial_value(const VIResult& r, const Game& g) {
  return r.valuation[static_cast<size_t>(g.initial)];
}

// Small random game: 2 team players and an opponent, <=3 states, <=2 actions,
// rational probabilities, last state the absorbing target.
Game random_game(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nact(1, 2);
  std::uniform_int_distribution<int> nstate(2, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  Game g;
  g.players = {"a", "b", "O"};
  int S = nstate(rng);
  for (int s = 0; s < S; ++s) g.states.push_back("q" + std::to_string(s));
  g.initial = 0;
  g.is_target.assign(static_cast<size_t>(S), false);
  g.is_target[static_cast<size_t>(S - 1)] = true;
  for (int p = 0; p < 3; ++p) {
    int n = nact(rng);
    std::vector<std::string> names;
    for (int a = 0; a < n; ++a) names.push_back(std::string(1, static_cast<char>('x' + a)));
    g.actions.push_back(names);
    g.available.emplace_back(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < n; ++a)
        g.available[static_cast<size_t>(p)][static_cast<size_t>(s)].push_back(a);
  }
  g.labels.assign(static_cast<size_t>(S), {});
  g.reserve_transitions();
  for (int s = 0; s < S; ++s) {
    std::int64_t jc = g.joint_count(s);
    for (std::int64_t j = 0; j < jc; ++j) {
      if (g.is_target[static_cast<size_t>(s)]) {
        g.set_delta(s, j, dirac(s));
        continue;
      }
      Distribution d;
      int t1 = std::uniform_int_distribution<int>(0, S - 1)(rng);
      if (coin(rng)) {
        d.add(t1, Rational(1));
      } else {
        int t2 = std::uniform_int_distribution<int>(0, S - 1)(rng);
        d.add(t1, Rational(1, 3));
        d.add(t2, Rational(2, 3));
        d.normalize_support();
      }
      g.set_delta(s, j, std::move(d));
    }
  }
  return g;
}

// One-step max-min operator evaluated by grid search instead of ascent.
std::vector<double> brute_force_fixpoint(const Game& g, int resolution) {
  std::vector<double> v(g.states.size(), 0.0);
  for (size_t s = 0; s < g.states.size(); ++s)
    if (g.is_target[s]) v[s] = 1.0;
  for (int iter = 0; iter < 4000; ++iter) {
    double change = 0.0;
    std::vector<double> nv = v;
    for (int s = 0; s < g.state_count(); ++s) {
      if (g.is_target[static_cast<size_t>(s)]) continue;
      double x = brute_force_independent(build_local_game(g, s, v), resolution);
      if (x > nv[static_cast<size_t>(s)]) nv[static_cast<size_t>(s)] = x;
      change = std::max(change, nv[static_cast<size_t>(s)] - v[static_cast<size_t>(s)]);
    }
    v = std::move(nv);
    if (change < 1e-4) break;
  }
  return v;
}

const std::vector<Game>& monotonicity_benchmarks() {
  static std::vector<Game> games = {builtin("door"), builtin("memory"),
                                    gen_jamming(2, {1, 1}), pursuit_scenario(1),
                                    robot_scenario(1)};
  return games;
}

}  // namespace

TEST_CASE("door values in both randomisation modes") {
  Timer timer;
  Game g = builtin("door");
  VIConfig ind;
  VIResult r = value_iteration(g, ind);
  double v0 = initial_value(r, g);
  auto cert = certify(g, r.profile, ind.stop);
  VIConfig sh;
  sh.mode = Mode::shared;
  double shared0 = initial_value(value_iteration(g, sh), g);
  report(1, v0 >= 0.3283 && v0 <= 0.3343 && cert[static_cast<size_t>(g.initial)] >= 0.32 &&
             shared0 >= 0.99 && timer.seconds() < 5.0);
}

TEST_CASE("memory game fixpoint") {
  Timer timer;
  Game g = builtin("memory");
  double v0 = initial_value(value_iteration(g, VIConfig{}), g);
  report(2, std::abs(v0 - 0.250) <= 0.002 && timer.seconds() < 5.0);
}

TEST_CASE("smallest jamming instance") {
  Timer timer;
  Game g = gen_jamming(2, {1, 1});
  std::int64_t transitions = transition_count(g);
  int states = g.state_count();
  VIConfig sh;
  sh.mode = Mode::shared;
  double shared0 = initial_value(value_iteration(g, sh), g);
  auto ind = decide_threshold_vi(g, Rational(0), VIConfig{});
  double certified = ind.certified[static_cast<size_t>(g.initial)];
  report(3, states == 5 && transitions == 135 && std::abs(shared0 - 0.250) <= 0.001 &&
             certified >= 0.245 && timer.seconds() < 30.0);
}

TEST_CASE("smallest pursuit instance") {
  Timer timer;
  Game g = pursuit_scenario(1);
  std::int64_t transitions = transition_count(g);
  int states = g.state_count();
  VIConfig sh;
  sh.mode = Mode::shared;
  double shared0 = initial_value(value_iteration(g, sh), g);
  auto ind = decide_threshold_vi(g, Rational(0), VIConfig{});
  double certified = ind.certified[static_cast<size_t>(g.initial)];
  report(4, states == 27 && transitions == 512 && std::abs(shared0 - 0.500) <= 0.002 &&
             certified >= 0.27 && certified <= 0.30 && timer.seconds() < 120.0);
}

TEST_CASE("smallest robot coordination instance") {
  Timer timer;
  Game g = robot_scenario(1);
  std::int64_t transitions = transition_count(g);
  int states = g.state_count();
  VIConfig sh;
  sh.mode = Mode::shared;
  double shared0 = initial_value(value_iteration(g, sh), g);
  auto ind = decide_threshold_vi(g, Rational(0), VIConfig{});
  double certified = ind.certified[static_cast<size_t>(g.initial)];
  report(5, states == 16 && transitions == 2000 && std::abs(shared0 - 0.324) <= 0.005 &&
             certified >= 0.27 && timer.seconds() < 300.0);
}

TEST_CASE("almost-sure verdicts on the calibration games") {
  Timer timer;
  bool ok = !solve_almost_sure(builtin("door")).yes;
  auto merged = solve_almost_sure(builtin("door-merged"));
  ok = ok && merged.yes && verify_certificate(builtin("door-merged"), merged.certificate).ok;
  ok = ok && solve_almost_sure(gen_clique(3, {{0, 1}, {1, 2}, {0, 2}}, 3)).yes;
  ok = ok && !solve_almost_sure(gen_clique(3, {{0, 1}, {1, 2}}, 3)).yes;
  report(6, ok && timer.seconds() < 40.0);
}

TEST_CASE("solver verdicts and values match enumeration oracles") {
  std::mt19937_64 rng(107);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    Game g = random_game(rng);
    if (solve_almost_sure(g).yes != brute_force_almost_sure(g)) ok = false;
    auto vi = value_iteration(g, VIConfig{});
    auto brute = brute_force_fixpoint(g, 50);
    for (size_t s = 0; s < brute.size(); ++s)
      if (std::abs(vi.valuation[s] - brute[s]) > 0.02) ok = false;
  }
  report(7, ok);
}

TEST_CASE("almost-sure verdicts ignore the exact probabilities") {
  std::mt19937_64 rng(211);
  std::uniform_int_distribution<int> weight(1, 5);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    Game g = random_game(rng);
    bool before = solve_almost_sure(g).yes;
    Game h = g;
    for (int s = 0; s < h.state_count(); ++s) {
      std::int64_t jc = h.joint_count(s);
      for (std::int64_t j = 0; j < jc; ++j) {
        const Distribution& d = h.delta(s, j);
        if (d.support.size() < 2) continue;
        std::vector<int> w;
        int total = 0;
        for (size_t i = 0; i < d.support.size(); ++i) {
          w.push_back(weight(rng));
          total += w.back();
        }
        Distribution nd;
        for (size_t i = 0; i < d.support.size(); ++i)
          nd.add(d.support[i].state, Rational(w[i], total));
        nd.normalize_support();
        h.set_delta(s, j, std::move(nd));
      }
    }
    if (solve_almost_sure(h).yes != before) ok = false;
  }
  report(8, ok);
}

TEST_CASE("shared-mode iterates are monotone on every benchmark") {
  bool ok = true;
  for (const Game& g : monotonicity_benchmarks()) {
    std::vector<double> prev(g.states.size(), -1.0);
    for (int cap = 1; cap <= 8 && ok; ++cap) {
      VIConfig cfg;
      cfg.mode = Mode::shared;
      cfg.stop.max_iters = cap;
      auto r = value_iteration(g, cfg);
      for (size_t s = 0; s < prev.size(); ++s)
        if (r.valuation[s] < prev[s] - 1e-12) ok = false;
      prev = r.valuation;
    }
  }
  report(9, ok);
}

TEST_CASE("rank comparator gadget is exact for every width up to six") {
  bool ok = true;
  for (int width = 1; width <= 6 && ok; ++width) {
    for (int a = 0; a < (1 << width) && ok; ++a) {
      for (int b = 0; b < (1 << width) && ok; ++b) {
        CnfInstance cnf;
        std::vector<int> abits, bbits;
        for (int i = 0; i < width; ++i) {
          abits.push_back(cnf.fresh());
          bbits.push_back(cnf.fresh());
        }
        int lt = emit_unsigned_less(cnf, abits, bbits);
        for (int i = 0; i < width; ++i) {
          cnf.add({(a >> i & 1) ? abits[static_cast<size_t>(i)] : -abits[static_cast<size_t>(i)]});
          cnf.add({(b >> i & 1) ? bbits[static_cast<size_t>(i)] : -bbits[static_cast<size_t>(i)]});
        }
        sat::Solver s;
        s.ensure_vars(cnf.var_count);
        for (const auto& cl : cnf.clauses) s.add_clause(cl);
        s.add_clause({a < b ? lt : -lt});
        if (!s.solve().has_value()) ok = false;
        sat::Solver n;
        n.ensure_vars(cnf.var_count);
        for (const auto& cl : cnf.clauses) n.add_clause(cl);
        n.add_clause({a < b ? -lt : lt});
        if (n.solve().has_value()) ok = false;
      }
    }
  }
  report(10, ok);
}

TEST_CASE("logic layer end to end") {
  CheckBackends backends;
  Game door = builtin("door");
  auto verdict_at = [&](const Game& g, const std::string& text) {
    return satisfying_states(g, parse_formula(text), backends)
        .verdict[static_cast<size_t>(g.initial)];
  };
  bool ok = verdict_at(door, "<<1,2>>^ind_>3/10 F goal") == Verdict::True &&
            verdict_at(door, "<<1,2>>^sh_almost F goal") == Verdict::True;

  // the almost-always operator must coincide with the pure safety fixpoint
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 100 && ok; ++trial) {
    Game g = random_game(rng);
    for (int s = 0; s < g.state_count(); ++s)
      if ((s + trial) % 2 == 0) g.labels[static_cast<size_t>(s)].push_back("p");
    auto rewritten = satisfying_states(g, parse_formula("<<a,b>>^ind_almost G p"), backends);
    std::vector<bool> safe(g.states.size(), false);
    for (int s = 0; s < g.state_count(); ++s)
      for (const auto& l : g.labels[static_cast<size_t>(s)])
        if (l == "p") safe[static_cast<size_t>(s)] = true;
    auto direct = solve_sure_box(g, safe);
    for (size_t s = 0; s < direct.size(); ++s)
      if ((rewritten.verdict[s] == Verdict::True) != direct[s]) ok = false;
  }
  report(11, ok);
}

TEST_CASE("external solver cross-check when an endpoint is configured") {
  auto ep = SolverEndpoint::from_env();
  if (!ep.has_value()) {
    std::printf("criterion 12: SKIP (no external solver endpoint configured)\n");
    std::fflush(stdout);
    return;
  }
  Game g = builtin("door");
  bool ok = run_solver(emit_threshold_formula(g, Rational(3, 10)), *ep).status ==
            SmtStatus::sat;
  LocalGame lg = build_local_game(g, g.initial, {0.0, 1.0, 0.0});
  ok = ok && run_solver(emit_local_game_query(lg, 0.24), *ep).status == SmtStatus::sat;
  ok = ok && run_solver(emit_local_game_query(lg, 0.26), *ep).status == SmtStatus::unsat;
  report(12, ok);
}
