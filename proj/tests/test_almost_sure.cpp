#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tg/almost_sure.hpp"
#include "tg/bench_gen.hpp"
#include "tg/sat_solver.hpp"

#include <random>
#include <sstream>

using namespace tg;

namespace {

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

}  // namespace

TEST_CASE("embedded sat solver handles basic formulas") {
  sat::Solver s;
  s.ensure_vars(3);
  s.add_clause({1, 2});
  s.add_clause({-1, 3});
  s.add_clause({-2, -3});
  auto m = s.solve();
  REQUIRE(m.has_value());
  auto sat_ok = [&](const std::vector<int>& cls) {
    for (int l : cls)
      if ((l > 0) == (*m)[static_cast<size_t>(std::abs(l))]) return true;
    return false;
  };
  CHECK(sat_ok({1, 2}));
  CHECK(sat_ok({-1, 3}));
  CHECK(sat_ok({-2, -3}));

  sat::Solver u;
  u.ensure_vars(1);
  u.add_clause({1});
  u.add_clause({-1});
  CHECK(!u.solve().has_value());
}

TEST_CASE("embedded sat solver survives pigeonhole unsat instances") {
  // 4 pigeons, 3 holes
  sat::Solver s;
  auto var = [](int p, int h) { return p * 3 + h + 1; };
  s.ensure_vars(12);
  for (int p = 0; p < 4; ++p) s.add_clause({var(p, 0), var(p, 1), var(p, 2)});
  for (int h = 0; h < 3; ++h)
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) s.add_clause({-var(p, h), -var(q, h)});
  CHECK(!s.solve().has_value());
}

TEST_CASE("door is not almost-surely winnable without shared randomness") {
  CHECK(!solve_almost_sure(builtin("door")).yes);
  CHECK(!solve_almost_sure(builtin("door"), RankEncoding::unary).yes);
}

TEST_CASE("merged door is almost-surely winnable with a verified certificate") {
  auto res = solve_almost_sure(builtin("door-merged"));
  REQUIRE(res.yes);
  auto check = verify_certificate(builtin("door-merged"), res.certificate);
  CHECK(check.ok);
  // s0 and goal are in the winning set; fail is not
  Game g = builtin("door-merged");
  std::vector<bool> in_w(3, false);
  for (int s : res.certificate.winning) in_w[static_cast<size_t>(s)] = true;
  CHECK(in_w[0]);
  CHECK(in_w[1]);
  CHECK(!in_w[2]);
  CHECK(res.certificate.rank[1] == 0);
  CHECK(res.certificate.rank[0] > 0);
}

TEST_CASE("clique games: triangle wins, path loses") {
  Game k3 = gen_clique(3, {{0, 1}, {1, 2}, {0, 2}}, 3);
  auto yes = solve_almost_sure(k3);
  REQUIRE(yes.yes);
  CHECK(verify_certificate(k3, yes.certificate).ok);
  Game p3 = gen_clique(3, {{0, 1}, {1, 2}}, 3);
  CHECK(!solve_almost_sure(p3).yes);
  // singleton clique always exists
  CHECK(solve_almost_sure(gen_clique(2, {}, 1)).yes);
}

TEST_CASE("binary and unary rank encodings agree") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    Game g = random_game(rng);
    CHECK(solve_almost_sure(g, RankEncoding::binary).yes ==
          solve_almost_sure(g, RankEncoding::unary).yes);
  }
}

TEST_CASE("solver verdict matches the enumeration oracle") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    Game g = random_game(rng);
    CHECK(solve_almost_sure(g).yes == brute_force_almost_sure(g));
  }
}

TEST_CASE("dimacs export is well-formed") {
  auto cnf = encode(builtin("door"));
  std::string text = to_dimacs(cnf);
  std::istringstream in(text);
  std::string line;
  int clauses = 0;
  bool saw_header = false;
  int vars = 0, declared_clauses = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') continue;
    if (line[0] == 'p') {
      std::istringstream h(line);
      std::string p, cnf_word;
      h >> p >> cnf_word >> vars >> declared_clauses;
      CHECK(cnf_word == "cnf");
      saw_header = true;
      continue;
    }
    ++clauses;
    std::istringstream c(line);
    int lit, last = -1;
    while (c >> lit) {
      last = lit;
      CHECK(std::abs(lit) <= vars);
    }
    CHECK(last == 0);
  }
  CHECK(saw_header);
  CHECK(clauses == declared_clauses);
  CHECK(vars == cnf.var_count);
  // named variables appear in the comment map
  CHECK(text.find("w_") != std::string::npos);
}

TEST_CASE("unsigned comparator gadget is exact for all widths up to six") {
  for (int width = 1; width <= 6; ++width) {
    for (int a = 0; a < (1 << width); ++a) {
      for (int b = 0; b < (1 << width); ++b) {
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
        cnf.add({a < b ? lt : -lt});
        sat::Solver s;
        s.ensure_vars(cnf.var_count);
        for (const auto& cl : cnf.clauses) s.add_clause(cl);
        CHECK(s.solve().has_value() == true);

        // and the negation must be unsat
        sat::Solver n;
        n.ensure_vars(cnf.var_count);
        for (const auto& cl : cnf.clauses) n.add_clause(cl);
        n.add_clause({a < b ? -lt : lt});
        n.add_clause({a < b ? lt : -lt});
        CHECK(!n.solve().has_value());
      }
    }
  }
}

TEST_CASE("compute_ranks accepts the winning door-merged supports") {
  Game g = builtin("door-merged");
  // merged player mixes L+L and R+R at s0; goal absorbs; fail outside W
  std::vector<std::vector<std::vector<int>>> supports = {{{0, 3}, {0}, {}}};
  auto out = compute_ranks(g, supports);
  CHECK(out.ok);
  CHECK(out.ranks[1] == 0);
  CHECK(out.ranks[0] == 1);
  CHECK(out.ranks[2] == -1);
}

TEST_CASE("compute_ranks rejects safety leaks") {
  Game g = builtin("door-merged");
  // mixing L+R leaks into fail, which is outside the candidate set
  std::vector<std::vector<std::vector<int>>> supports = {{{0, 1}, {0}, {}}};
  auto out = compute_ranks(g, supports);
  CHECK(!out.ok);
  CHECK(!out.failure.empty());
  // supports outside availability are a caller bug
  std::vector<std::vector<std::vector<int>>> bad = {{{9}, {0}, {}}};
  CHECK_THROWS_AS(compute_ranks(g, bad), std::invalid_argument);
}

TEST_CASE("verify_certificate rejects tampered certificates") {
  Game g = builtin("door-merged");
  auto res = solve_almost_sure(g);
  REQUIRE(res.yes);

  auto tampered = res.certificate;
  tampered.winning.push_back(2);  // fail state cannot be winning
  tampered.rank[2] = 5;
  tampered.supports[0][2] = {0};
  CHECK(!verify_certificate(g, tampered).ok);

  auto bad_rank = res.certificate;
  bad_rank.rank[0] = 0;  // rank zero is reserved for targets
  CHECK(!verify_certificate(g, bad_rank).ok);

  auto bad_support = res.certificate;
  bad_support.supports[0][0] = {1};  // L+R leaks to fail
  CHECK(!verify_certificate(g, bad_support).ok);
}

TEST_CASE("brute force enumeration guards its budget") {
  Game g = pursuit_scenario(5);  // 3 team players with 4 actions in 256 states
  CHECK_THROWS(brute_force_almost_sure(g));
}
