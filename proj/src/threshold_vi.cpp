#include "tg/threshold_vi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace tg {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t iter, std::uint64_t state) {
  std::uint64_t z = seed ^ (iter * 0x9E3779B97F4A7C15ull) ^ (state * 0xBF58476D1CE4E5B9ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Exact rational selector from a double vector: convert dyadically, then
// rescale so the sum is exactly 1 (induced_mdp and certify need exactness).
std::vector<Rational> exact_selector(const std::vector<double>& v) {
  std::vector<Rational> out;
  Rational sum = 0;
  for (double x : v) {
    Rational r = x > 0 ? rational_from_double(x) : Rational(0);
    sum += r;
    out.push_back(std::move(r));
  }
  if (sum == 0) {
    out.assign(v.size(), Rational(1, static_cast<int>(v.size())));
  } else if (sum != 1) {
    for (auto& r : out) r /= sum;
  }
  return out;
}

// Exact local value via external solver: bisect with one-shot feasibility
// queries between a known-achievable lower bound and an upper bound.
double refine_with_solver(const LocalGame& lg, const SolverEndpoint& solver,
                          double lo, double hi, std::vector<double>* team_mix,
                          const Game& g, int s, bool* solver_trouble) {
  const double prec = 1e-6;
  int guard = 40;
  while (hi - lo > prec && guard-- > 0) {
    double mid = 0.5 * (lo + hi);
    auto verdict = run_solver(emit_local_game_query(lg, mid), solver);
    if (verdict.status == SmtStatus::unsat) {
      hi = mid;
    } else if (verdict.status == SmtStatus::sat) {
      lo = mid;
      if (team_mix) {
        for (int p = 0; p < g.team_size(); ++p) {
          for (size_t k = 0; k < g.available[p][s].size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof name, "x_%d_%zu", p, k);
            auto it = verdict.model.find(name);
            if (it != verdict.model.end())
              team_mix[p][k] = to_double(it->second);
          }
        }
      }
    } else {
      if (solver_trouble) *solver_trouble = true;
      break;
    }
  }
  return lo;
}

}  // namespace

Game solved_form(const Game& game, Mode mode) {
  if (mode == Mode::shared && game.team_size() > 1) return merge_team(game);
  return game;
}

VIResult value_iteration(const Game& game, const VIConfig& cfg) {
  auto report = validate(game);
  if (!report.ok) throw std::invalid_argument("invalid game:\n" + report.to_string());
  if (cfg.backend == Backend::smt && !cfg.solver)
    throw std::invalid_argument("smt backend needs a configured solver endpoint");

  Game g = solved_form(game, cfg.mode);
  int S = g.state_count();

  VIResult res;
  res.mode = cfg.mode;
  res.backend = cfg.backend;
  bool hybrid_degraded = cfg.backend == Backend::hybrid && !cfg.solver;
  if (hybrid_degraded)
    res.warnings.push_back("no solver endpoint configured; hybrid backend degraded to opt");

  std::vector<double> v(static_cast<size_t>(S), 0.0);
  for (int s = 0; s < S; ++s)
    if (g.is_target[s]) v[static_cast<size_t>(s)] = 1.0;

  // Best selector per state so far, as doubles; exactified on extraction.
  std::vector<std::vector<std::vector<double>>> sel(static_cast<size_t>(g.team_size()));
  for (int p = 0; p < g.team_size(); ++p) {
    sel[static_cast<size_t>(p)].resize(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s)
      sel[static_cast<size_t>(p)][static_cast<size_t>(s)].assign(
          g.available[p][s].size(), 1.0 / g.available[p][s].size());
  }

  std::vector<int> work;
  for (int s = 0; s < S; ++s)
    if (!g.is_target[s]) work.push_back(s);

  int jobs = std::max(1, cfg.jobs);
  std::atomic<bool> solver_trouble{false};

  for (int iter = 1; iter <= cfg.stop.max_iters; ++iter) {
    std::vector<double> nv = v;
    std::vector<char> improved(static_cast<size_t>(S), 0);
    std::vector<std::vector<std::vector<double>>> new_sel = sel;

    auto solve_state = [&](int s) {
      LocalGame lg = build_local_game(g, s, v);
      double value;
      std::vector<std::vector<double>> mix(static_cast<size_t>(g.team_size()));
      if (cfg.mode == Mode::shared || g.team_size() <= 1) {
        auto sol = solve_shared(lg);
        value = sol.value;
        if (!mix.empty()) mix[0] = sol.joint;
      } else {
        IndependentConfig local = cfg.local;
        local.seed = mix_seed(cfg.local.seed, static_cast<std::uint64_t>(iter),
                              static_cast<std::uint64_t>(s));
        auto sol = solve_independent(lg, local);
        value = sol.value;
        mix = sol.selector.probs;
        if (cfg.backend != Backend::opt && cfg.solver) {
          // Upper bound from the shared relaxation caps the search.
          double hi = std::min(1.0, solve_shared(lg).value + 1e-9);
          bool trouble = false;
          if (cfg.backend == Backend::smt) {
            value = refine_with_solver(lg, *cfg.solver, value, hi, mix.data(), g, s, &trouble);
          } else {
            auto probe = run_solver(emit_local_game_query(lg, value + 1e-4), *cfg.solver);
            if (probe.status == SmtStatus::sat)
              value = refine_with_solver(lg, *cfg.solver, value + 1e-4, hi,
                                         mix.data(), g, s, &trouble);
            else if (probe.status != SmtStatus::unsat)
              trouble = true;
          }
          if (trouble) solver_trouble = true;
        }
      }
      value = std::clamp(value, 0.0, 1.0);
      // Monotone envelope: keep the best sound lower bound seen per state.
      if (value > nv[static_cast<size_t>(s)]) {
        nv[static_cast<size_t>(s)] = value;
        improved[static_cast<size_t>(s)] = 1;
        for (int p = 0; p < g.team_size(); ++p)
          new_sel[static_cast<size_t>(p)][static_cast<size_t>(s)] = mix[static_cast<size_t>(p)];
      }
    };

    if (jobs == 1 || static_cast<int>(work.size()) < 2) {
      for (int s : work) solve_state(s);
    } else {
      std::atomic<size_t> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
          for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= work.size()) return;
            solve_state(work[i]);
          }
        });
      for (auto& th : pool) th.join();
    }

    double delta = 0.0;
    for (int s = 0; s < S; ++s)
      delta = std::max(delta, nv[static_cast<size_t>(s)] - v[static_cast<size_t>(s)]);
    v = std::move(nv);
    sel = std::move(new_sel);
    res.delta_history.push_back(delta);
    res.iterations = iter;
    if (delta < cfg.stop.tolerance) break;
  }

  if (solver_trouble)
    res.warnings.push_back("solver returned unknown/timeout on some local queries");

  res.valuation = std::move(v);
  res.profile.probs.resize(static_cast<size_t>(g.team_size()));
  for (int p = 0; p < g.team_size(); ++p) {
    res.profile.probs[static_cast<size_t>(p)].resize(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s)
      res.profile.probs[static_cast<size_t>(p)][static_cast<size_t>(s)] =
          exact_selector(sel[static_cast<size_t>(p)][static_cast<size_t>(s)]);
  }
  return res;
}

std::vector<double> certify(const Game& game, const MemorylessProfile& profile,
                            const StopCriteria& stop) {
  Game mdp = induced_mdp(game, profile);
  int S = mdp.state_count();
  std::vector<double> u(static_cast<size_t>(S), 0.0);
  for (int s = 0; s < S; ++s)
    if (mdp.is_target[s]) u[static_cast<size_t>(s)] = 1.0;

  for (int iter = 0; iter < stop.max_iters; ++iter) {
    double delta = 0.0;
    std::vector<double> nu = u;
    for (int s = 0; s < S; ++s) {
      if (mdp.is_target[s]) continue;
      double worst = std::numeric_limits<double>::infinity();
      std::int64_t jc = mdp.joint_count(s);
      for (std::int64_t b = 0; b < jc; ++b) {
        double acc = 0.0;
        for (const auto& e : mdp.delta(s, b).support)
          acc += e.prob_f * u[static_cast<size_t>(e.state)];
        worst = std::min(worst, acc);
      }
      nu[static_cast<size_t>(s)] = worst;
      delta = std::max(delta, std::abs(worst - u[static_cast<size_t>(s)]));
    }
    u = std::move(nu);
    if (delta < stop.tolerance) break;
  }
  return u;
}

ThresholdResult decide_threshold_vi(const Game& game, const Rational& t,
                                    const VIConfig& cfg) {
  if (t < 0 || t > 1) throw std::invalid_argument("threshold outside [0,1]");
  ThresholdResult out;
  out.vi = value_iteration(game, cfg);
  Game g = solved_form(game, cfg.mode);
  out.profile = out.vi.profile;
  out.certified = certify(g, out.profile, cfg.stop);
  double bound = out.certified[static_cast<size_t>(g.initial)];
  out.verdict = bound > to_double(t) ? ThresholdVerdict::Yes : ThresholdVerdict::Unknown;
  return out;
}

}  // namespace tg
