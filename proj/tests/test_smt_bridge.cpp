#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tg/bench_gen.hpp"
#include "tg/one_shot.hpp"
#include "tg/smt_bridge.hpp"

#include <cstdlib>
#include <fstream>

using namespace tg;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size()))
    ++n;
  return n;
}

// Fake solver: a shell script that ignores its input and prints canned output.
SolverEndpoint fake_solver(const std::string& body) {
  static int serial = 0;
  std::string path = "/tmp/tg_fake_solver_" + std::to_string(serial++) + ".sh";
  std::ofstream f(path);
  f << "#!/bin/sh\n" << body;
  f.close();
  std::system(("chmod +x " + path).c_str());
  SolverEndpoint ep;
  ep.path = path;
  ep.timeout_sec = 10;
  return ep;
}

}  // namespace

TEST_CASE("threshold formula for the door game has the expected shape") {
  Game g = builtin("door");
  SmtScript sc = emit_threshold_formula(g, Rational(3, 10));
  // lam + 3 state values + 4 strategy variables (absorbing states need none)
  CHECK(sc.decls.size() == 8);
  std::string text = sc.render();
  CHECK(text.find("(set-logic QF_NRA)") != std::string::npos);
  CHECK(text.find("(check-sat)") != std::string::npos);
  CHECK(text.find("(get-model)") != std::string::npos);
  CHECK(text.find("(> lam 0)") != std::string::npos);
  CHECK(text.find("(< lam 1)") != std::string::npos);
  // target pinned to 1, threshold strict at the initial state
  CHECK(text.find("(= v_1 1)") != std::string::npos);
  CHECK(text.find("(> v_0 (/ 3 10))") != std::string::npos);
  // absorbing fail state collapses to v <= lam*v without strategy variables
  CHECK(text.find("(<= v_2 (* lam v_2))") != std::string::npos);
  CHECK(text.find("x_2_") == std::string::npos);
  // per-opponent-action constraints at the live state
  CHECK(count_occurrences(text, "(<= v_0 (* lam ") == 2);
  // strategy simplex rows for both team players
  CHECK(text.find("(= (+ x_0_0_0 x_0_0_1) 1)") != std::string::npos);
  CHECK(text.find("(= (+ x_0_1_0 x_0_1_1) 1)") != std::string::npos);
}

TEST_CASE("threshold formula renders deterministically") {
  Game g = gen_jamming(2, {1, 1});
  CHECK(emit_threshold_formula(g, Rational(1, 4)).render() ==
        emit_threshold_formula(g, Rational(1, 4)).render());
}

TEST_CASE("local game query encodes per-column guarantees") {
  Game g = builtin("door");
  LocalGame lg = build_local_game(g, 0, {0.0, 1.0, 0.0});
  SmtScript sc = emit_local_game_query(lg, 0.25);
  CHECK(sc.decls.size() == 4);  // two binary players
  std::string text = sc.render();
  CHECK(count_occurrences(text, "(>= (+ ") == 2);  // one row per opponent action
  CHECK(text.find("(/ 1 4)") != std::string::npos);
  CHECK(text.find("(= (+ x_0_0 x_0_1) 1)") != std::string::npos);
}

TEST_CASE("negative and fractional constants render in smt syntax") {
  LocalGame lg;
  lg.team_sizes = {1};
  lg.opp_count = 1;
  lg.V = {{-0.5}};
  std::string text = emit_local_game_query(lg, -0.5).render();
  CHECK(text.find("(- (/ 1 2))") != std::string::npos);
}

TEST_CASE("endpoint from environment variables") {
  setenv("TG_SMT_SOLVER", "/opt/fake/z3", 1);
  setenv("TG_SMT_ARGS", "-smt2 {file}", 1);
  setenv("TG_SMT_TIMEOUT", "12.5", 1);
  auto ep = SolverEndpoint::from_env();
  REQUIRE(ep.has_value());
  CHECK(ep->path == "/opt/fake/z3");
  CHECK(ep->args == std::vector<std::string>{"-smt2", "{file}"});
  CHECK(ep->timeout_sec == 12.5);
  unsetenv("TG_SMT_SOLVER");
  unsetenv("TG_SMT_ARGS");
  unsetenv("TG_SMT_TIMEOUT");
  CHECK(!SolverEndpoint::from_env().has_value());
}

TEST_CASE("run_solver parses sat output with a model") {
  auto ep = fake_solver(
      "echo sat\n"
      "echo '(model'\n"
      "echo '  (define-fun lam () Real (/ 9 10))'\n"
      "echo '  (define-fun v_0 () Real (/ 1 3))'\n"
      "echo '  (define-fun x_0_0_0 () Real 1)'\n"
      "echo '  (define-fun x_0_0_1 () Real (- (/ 0 1)))'\n"
      "echo ')'\n");
  SmtScript sc;
  auto v = run_solver(sc, ep);
  CHECK(v.status == SmtStatus::sat);
  CHECK(v.model.at("lam") == Rational(9, 10));
  CHECK(v.model.at("v_0") == Rational(1, 3));
  CHECK(v.model.at("x_0_0_0") == Rational(1));
  CHECK(v.model.at("x_0_0_1") == Rational(0));
}

TEST_CASE("run_solver maps unsat, unknown, and garbage") {
  SmtScript sc;
  CHECK(run_solver(sc, fake_solver("echo unsat\n")).status == SmtStatus::unsat);
  CHECK(run_solver(sc, fake_solver("echo unknown\n")).status == SmtStatus::unknown);
  auto bad = run_solver(sc, fake_solver("echo whatever\n"));
  CHECK(bad.status == SmtStatus::error);
  CHECK(!bad.detail.empty());
  auto missing = run_solver(sc, SolverEndpoint{"/nonexistent/solver", {}, 5});
  CHECK(missing.status == SmtStatus::error);
}

TEST_CASE("run_solver reports a timeout") {
  auto ep = fake_solver("sleep 30\necho sat\n");
  ep.timeout_sec = 0.2;
  SmtScript sc;
  CHECK(run_solver(sc, ep).status == SmtStatus::timeout);
}

TEST_CASE("solver receives the script through the {file} argument") {
  auto ep = fake_solver("grep -q 'check-sat' \"$1\" && echo unsat || echo sat\n");
  ep.args = {"{file}"};
  SmtScript sc;
  CHECK(run_solver(sc, ep).status == SmtStatus::unsat);
}

TEST_CASE("profile_from_model decodes and renormalizes strategy variables") {
  Game g = builtin("door");
  std::map<std::string, Rational> model;
  model["x_0_0_0"] = Rational(1, 3);
  model["x_0_0_1"] = Rational(1, 3);  // deliberately sums to 2/3
  model["x_0_1_0"] = Rational(1);
  model["x_0_1_1"] = Rational(0);
  auto mp = profile_from_model(g, model);
  CHECK(mp.valid_for(g, nullptr));
  CHECK(mp.probs[0][0][0] == Rational(1, 2));
  CHECK(mp.probs[0][0][1] == Rational(1, 2));
  CHECK(mp.probs[1][0][0] == Rational(1));
  // untouched states keep the uniform fallback
  CHECK(mp.probs[0][2][0] == Rational(1, 2));
}

TEST_CASE("bisect with a decisive fake solver brackets at the midpoint rule") {
  // always-sat solver drives lo towards 1
  Game g = builtin("door");
  auto sat = fake_solver("echo sat\n");
  auto r = bisect_value(g, 0.25, sat);
  CHECK(r.lo >= 0.75);
  CHECK(r.hi == 1.0);
  CHECK(!r.partial);
  auto unk = fake_solver("echo unknown\n");
  auto p = bisect_value(g, 0.25, unk);
  CHECK(p.partial);
  CHECK_THROWS(bisect_value(g, 0.0, sat));
}
