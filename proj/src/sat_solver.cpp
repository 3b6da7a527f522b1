#include "tg/sat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tg::sat {

// Internal literal encoding: lit = 2*(var-1) + (negative ? 1 : 0).
namespace {
inline int intern(int dimacs) {
  int v = dimacs > 0 ? dimacs : -dimacs;
  return 2 * (v - 1) + (dimacs < 0 ? 1 : 0);
}
inline int neg(int lit) { return lit ^ 1; }
inline int lit_var(int lit) { return lit >> 1; }  // 0-based
}  // namespace

int Solver::new_var() {
  ++nvars_;
  watches_.resize(2 * static_cast<size_t>(nvars_));
  value_.resize(2 * static_cast<size_t>(nvars_), 0);
  reason_.resize(static_cast<size_t>(nvars_), -1);
  level_.resize(static_cast<size_t>(nvars_), 0);
  activity_.resize(static_cast<size_t>(nvars_), 0.0);
  phase_.resize(static_cast<size_t>(nvars_), -1);
  return nvars_;
}

void Solver::ensure_vars(int n) {
  while (nvars_ < n) new_var();
}

void Solver::add_clause(const std::vector<int>& dimacs) {
  if (unsat_) return;
  std::vector<int> lits;
  for (int d : dimacs) {
    if (d == 0) throw std::invalid_argument("zero literal");
    ensure_vars(std::abs(d));
    lits.push_back(intern(d));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (size_t i = 0; i + 1 < lits.size(); ++i)
    if (lits[i + 1] == neg(lits[i])) return;  // tautology
  if (lits.empty()) {
    unsat_ = true;
    return;
  }
  if (lits.size() == 1) {
    pending_units_.push_back(lits[0]);
    return;
  }
  int id = static_cast<int>(clauses_.size());
  clauses_.push_back({lits, 0.0, false});
  watches_[static_cast<size_t>(lits[0])].push_back(id);
  watches_[static_cast<size_t>(lits[1])].push_back(id);
}

bool Solver::enqueue(int lit, int reason) {
  if (value_[static_cast<size_t>(lit)] == 1) return true;
  if (value_[static_cast<size_t>(lit)] == -1) return false;
  value_[static_cast<size_t>(lit)] = 1;
  value_[static_cast<size_t>(neg(lit))] = -1;
  int v = lit_var(lit);
  reason_[static_cast<size_t>(v)] = reason;
  level_[static_cast<size_t>(v)] = decision_level();
  trail_.push_back(lit);
  return true;
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    int lit = trail_[qhead_++];
    int flit = neg(lit);  // clauses watching the now-false literal
    auto& wl = watches_[static_cast<size_t>(flit)];
    size_t keep = 0;
    for (size_t i = 0; i < wl.size(); ++i) {
      int cid = wl[i];
      auto& c = clauses_[static_cast<size_t>(cid)].lits;
      if (c[0] == flit) std::swap(c[0], c[1]);
      // c[1] == flit now.
      if (value_[static_cast<size_t>(c[0])] == 1) {
        wl[keep++] = cid;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k) {
        if (value_[static_cast<size_t>(c[k])] != -1) {
          std::swap(c[1], c[k]);
          watches_[static_cast<size_t>(c[1])].push_back(cid);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      wl[keep++] = cid;
      if (!enqueue(c[0], cid)) {
        for (size_t j = i + 1; j < wl.size(); ++j) wl[keep++] = wl[j];
        wl.resize(keep);
        qhead_ = trail_.size();
        return cid;
      }
    }
    wl.resize(keep);
  }
  return -1;
}

void Solver::bump_var(int v) {
  activity_[static_cast<size_t>(v)] += var_inc_;
  if (activity_[static_cast<size_t>(v)] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
}

void Solver::analyze(int confl, std::vector<int>& learnt, int& bt_level) {
  learnt.clear();
  learnt.push_back(0);  // slot for the asserting literal
  std::vector<char> seen(static_cast<size_t>(nvars_), 0);
  int counter = 0;
  int lit = -1;
  size_t idx = trail_.size();

  int cid = confl;
  do {
    const auto& c = clauses_[static_cast<size_t>(cid)].lits;
    for (size_t k = (lit == -1 ? 0 : 1); k < c.size(); ++k) {
      int q = c[k];
      int v = lit_var(q);
      if (seen[static_cast<size_t>(v)] || level_[static_cast<size_t>(v)] == 0) continue;
      seen[static_cast<size_t>(v)] = 1;
      bump_var(v);
      if (level_[static_cast<size_t>(v)] == decision_level())
        ++counter;
      else
        learnt.push_back(q);
    }
    // Walk the trail back to the next marked literal.
    do {
      lit = trail_[--idx];
    } while (!seen[static_cast<size_t>(lit_var(lit))]);
    seen[static_cast<size_t>(lit_var(lit))] = 0;
    cid = reason_[static_cast<size_t>(lit_var(lit))];
    --counter;
    if (counter > 0 && cid == -1)
      throw std::logic_error("conflict analysis hit a decision unexpectedly");
  } while (counter > 0);
  learnt[0] = neg(lit);

  bt_level = 0;
  if (learnt.size() > 1) {
    size_t max_i = 1;
    for (size_t i = 2; i < learnt.size(); ++i)
      if (level_[static_cast<size_t>(lit_var(learnt[i]))] >
          level_[static_cast<size_t>(lit_var(learnt[max_i]))])
        max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[static_cast<size_t>(lit_var(learnt[1]))];
  }
}

void Solver::backtrack(int lvl) {
  while (!trail_lim_.empty() && decision_level() > lvl) {
    int limit = trail_lim_.back();
    trail_lim_.pop_back();
    while (static_cast<int>(trail_.size()) > limit) {
      int lit = trail_.back();
      trail_.pop_back();
      int v = lit_var(lit);
      phase_[static_cast<size_t>(v)] = static_cast<signed char>((lit & 1) ? -1 : 1);
      value_[static_cast<size_t>(lit)] = 0;
      value_[static_cast<size_t>(neg(lit))] = 0;
      reason_[static_cast<size_t>(v)] = -1;
    }
  }
  qhead_ = trail_.size();
}

int Solver::pick_branch() {
  int best = -1;
  double best_act = -1.0;
  for (int v = 0; v < nvars_; ++v) {
    if (value_[static_cast<size_t>(2 * v)] != 0) continue;
    if (activity_[static_cast<size_t>(v)] > best_act) {
      best_act = activity_[static_cast<size_t>(v)];
      best = v;
    }
  }
  if (best < 0) return -1;
  bool positive = phase_[static_cast<size_t>(best)] >= 0;
  return 2 * best + (positive ? 0 : 1);
}

std::optional<std::vector<bool>> Solver::solve() {
  if (unsat_) return std::nullopt;
  for (int u : pending_units_)
    if (!enqueue(u, -1)) {
      unsat_ = true;
      return std::nullopt;
    }
  pending_units_.clear();
  if (propagate() != -1) {
    unsat_ = true;
    return std::nullopt;
  }

  long long conflicts = 0;
  long long restart_limit = 100;

  for (;;) {
    int confl = propagate();
    if (confl != -1) {
      ++conflicts;
      if (decision_level() == 0) {
        unsat_ = true;
        return std::nullopt;
      }
      std::vector<int> learnt;
      int bt = 0;
      analyze(confl, learnt, bt);
      backtrack(bt);
      var_inc_ /= 0.95;
      if (learnt.size() == 1) {
        if (!enqueue(learnt[0], -1)) {
          unsat_ = true;
          return std::nullopt;
        }
      } else {
        int id = static_cast<int>(clauses_.size());
        clauses_.push_back({learnt, 0.0, true});
        watches_[static_cast<size_t>(learnt[0])].push_back(id);
        watches_[static_cast<size_t>(learnt[1])].push_back(id);
        enqueue(learnt[0], id);
      }
      if (conflicts >= restart_limit) {
        restart_limit += restart_limit / 2;
        backtrack(0);
      }
    } else {
      int lit = pick_branch();
      if (lit == -1) {
        std::vector<bool> model(static_cast<size_t>(nvars_) + 1, false);
        for (int v = 0; v < nvars_; ++v)
          model[static_cast<size_t>(v) + 1] = value_[static_cast<size_t>(2 * v)] == 1;
        return model;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(lit, -1);
    }
  }
}

}  // namespace tg::sat
