#pragma once

#include "tg/game.hpp"
#include "tg/one_shot.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tg {

/// An SMT-LIB 2 script over nonlinear real arithmetic. Rendering is
/// deterministic: declarations in insertion order, one assertion per line.
struct SmtScript {
  std::vector<std::string> decls;  // variable names, all sort Real
  std::vector<std::string> assertions;
  std::string render() const;  // set-logic QF_NRA ... (check-sat) (get-model)
};

enum class SmtStatus { sat, unsat, unknown, timeout, error };

struct SolverVerdict {
  SmtStatus status = SmtStatus::error;
  std::map<std::string, Rational> model;  // populated only on sat
  std::string detail;                     // diagnostic on error
};

/// External solver subprocess: executable + argument template; "{file}" in an
/// argument is replaced by the script path (appended when absent).
struct SolverEndpoint {
  std::string path;
  std::vector<std::string> args;
  double timeout_sec = 60.0;

  /// Reads TG_SMT_SOLVER / TG_SMT_ARGS / TG_SMT_TIMEOUT; nullopt when unset.
  static std::optional<SolverEndpoint> from_env();
};

/// The full existential threshold encoding: per-state per-player strategy
/// variables, state values, a discount λ ∈ (0,1), and v(initial) > t.
/// Satisfiable iff some team profile guarantees reaching the targets with
/// probability strictly above t.
SmtScript emit_threshold_formula(const Game& game, const Rational& t);

/// One-shot feasibility: is the local max-min value ≥ c?
SmtScript emit_local_game_query(const LocalGame& local, double c);

SolverVerdict run_solver(const SmtScript& script, const SolverEndpoint& solver);

SolverVerdict decide_threshold_exact(const Game& game, const Rational& t,
                                     const SolverEndpoint& solver);

struct BisectResult {
  double lo = 0.0;   // highest threshold known satisfiable
  double hi = 1.0;   // lowest threshold known unsatisfiable (or 1)
  bool partial = false;  // a query came back unknown/timeout
};

BisectResult bisect_value(const Game& game, double precision,
                          const SolverEndpoint& solver);

/// Decodes the x_{s,i,a} part of a sat model into a profile.
MemorylessProfile profile_from_model(const Game& game,
                                     const std::map<std::string, Rational>& model);

}  // namespace tg
