#pragma once

#include <optional>
#include <vector>

namespace tg::sat {

/// CDCL solver over DIMACS-convention literals (±var, vars 1-based).
/// Watched literals, first-UIP learning, geometric restarts, phase saving.
class Solver {
 public:
  int new_var();                       // returns the new 1-based variable
  void ensure_vars(int n);             // grow to at least n variables
  void add_clause(const std::vector<int>& lits);
  int var_count() const { return nvars_; }

  /// model[v] for v in 1..var_count(); nullopt on unsat.
  std::optional<std::vector<bool>> solve();

 private:
  struct Clause {
    std::vector<int> lits;  // internal encoding
    double activity = 0.0;
    bool learnt = false;
  };

  int nvars_ = 0;
  bool unsat_ = false;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;  // per internal literal -> clause ids
  std::vector<signed char> value_;         // per internal literal: 1 true, -1 false, 0 unset
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::vector<int> reason_;   // per var, clause id or -1
  std::vector<int> level_;    // per var
  std::vector<double> activity_;
  std::vector<signed char> phase_;
  std::vector<int> pending_units_;
  double var_inc_ = 1.0;
  size_t qhead_ = 0;

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  bool enqueue(int lit, int reason);
  int propagate();  // conflicting clause id or -1
  void analyze(int confl, std::vector<int>& learnt, int& bt_level);
  void backtrack(int level);
  void bump_var(int v);
  int pick_branch();
};

}  // namespace tg::sat
