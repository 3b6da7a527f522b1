#pragma once

#include "tg/game.hpp"
#include "tg/threshold_vi.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tg {

enum class PathOp { Next, Box, Until };
enum class RandType { sh, ind };
enum class WinCond { sure, almost, threshold };

struct Formula;
using FormulaPtr = std::shared_ptr<Formula>;

struct Formula {
  enum class Kind { True, Atom, Not, Or, Quant } kind = Kind::True;
  std::string atom;
  FormulaPtr lhs, rhs;  // Not: lhs; Or: lhs | rhs

  // Quant: <<coalition>>^rand_win path
  std::vector<std::string> coalition;
  RandType rand = RandType::ind;
  WinCond win = WinCond::sure;
  Rational threshold;
  PathOp path = PathOp::Next;
  FormulaPtr pf, pg;  // X pf / G pf / pf U pg (F φ sugars to true U φ)

  std::string to_string() const;
};

/// Grammar: formula := atom | "true" | "!" f | f "|" f | "(" f ")"
///                   | "<<" ids ">>" "^" ("sh"|"ind") "_" ("sure"|"almost"|">" rational) path
///          path := "X" f | "G" f | "F" f | f "U" f
/// Rejects the undecidable pieces (limit operators, threshold-Box) with a
/// located error. Throws std::runtime_error on syntax errors.
FormulaPtr parse_formula(const std::string& text);

enum class Verdict { False = 0, True = 1, Unknown = 2 };

struct CheckResult {
  std::vector<Verdict> verdict;       // per state
  std::vector<std::string> provenance;  // which backend decided each subformula
};

struct CheckBackends {
  std::optional<SolverEndpoint> solver;  // exact threshold decisions when set
  StopCriteria stop;
  IndependentConfig local;
  int jobs = 1;
};

/// Bottom-up three-valued evaluation. Unknown arises only from threshold
/// subgoals decided by the value-iteration semi-decision.
CheckResult satisfying_states(const Game& structure, const FormulaPtr& formula,
                              const CheckBackends& backends);

/// Pure controllable predecessor for the declared team of `h`:
/// { s | ∃ team joint action ∀ opponent action: supp δ ⊆ X }.
std::vector<bool> cpre(const Game& h, const std::vector<bool>& X);

std::vector<bool> solve_sure_next(const Game& h, const std::vector<bool>& target);
/// Greatest fixpoint of X ↦ pset ∩ CPre(X).
std::vector<bool> solve_sure_box(const Game& h, const std::vector<bool>& pset);
/// Least fixpoint of X ↦ qset ∪ (pset ∩ CPre(X)).
std::vector<bool> solve_sure_until(const Game& h, const std::vector<bool>& pset,
                                   const std::vector<bool>& qset);

}  // namespace tg
