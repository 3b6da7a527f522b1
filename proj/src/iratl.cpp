#include "tg/iratl.hpp"

#include "tg/almost_sure.hpp"
#include "tg/one_shot.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace tg {

// ---------------------------------------------------------------- printing

std::string Formula::to_string() const {
  switch (kind) {
    case Kind::True:
      return "true";
    case Kind::Atom:
      return atom;
    case Kind::Not:
      return "!" + lhs->to_string();
    case Kind::Or:
      return "(" + lhs->to_string() + " | " + rhs->to_string() + ")";
    case Kind::Quant: {
      std::string out = "<<";
      for (size_t i = 0; i < coalition.size(); ++i)
        out += (i ? "," : "") + coalition[i];
      out += ">>^";
      out += rand == RandType::sh ? "sh" : "ind";
      out += "_";
      if (win == WinCond::sure)
        out += "sure";
      else if (win == WinCond::almost)
        out += "almost";
      else
        out += ">" + rational_to_string(threshold);
      out += " ";
      if (path == PathOp::Next)
        out += "X " + pf->to_string();
      else if (path == PathOp::Box)
        out += "G " + pf->to_string();
      else
        out += pf->to_string() + " U " + pg->to_string();
      return out;
    }
  }
  return "?";
}

// ----------------------------------------------------------------- parser

namespace {

struct Token {
  std::string text;
  size_t pos = 0;
  bool symbol = false;
};

[[noreturn]] void syntax_error(const std::string& msg, size_t pos) {
  throw std::runtime_error("formula error at offset " + std::to_string(pos) + ": " + msg);
}

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/' || c == '.';
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '<' && i + 1 < s.size() && s[i + 1] == '<') {
      out.push_back({"<<", i, true});
      i += 2;
    } else if (c == '>' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({">>", i, true});
      i += 2;
    } else if (c == '^' || c == '|' || c == '!' || c == '(' || c == ')' || c == ',' || c == '>') {
      out.push_back({std::string(1, c), i, true});
      ++i;
    } else if (word_char(c)) {
      size_t start = i;
      while (i < s.size() && word_char(s[i])) ++i;
      out.push_back({s.substr(start, i - start), start, false});
    } else {
      syntax_error(std::string("unexpected character '") + c + "'", i);
    }
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  FormulaPtr parse() {
    auto f = parse_or();
    if (pos_ < toks_.size()) syntax_error("trailing input", toks_[pos_].pos);
    return f;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  bool at_symbol(const std::string& s) const {
    return pos_ < toks_.size() && toks_[pos_].symbol && toks_[pos_].text == s;
  }
  bool at_word(const std::string& s) const {
    return pos_ < toks_.size() && !toks_[pos_].symbol && toks_[pos_].text == s;
  }
  Token take() {
    if (pos_ >= toks_.size()) syntax_error("unexpected end of formula", toks_.empty() ? 0 : toks_.back().pos);
    return toks_[pos_++];
  }
  void expect_symbol(const std::string& s) {
    if (!at_symbol(s)) syntax_error("expected \"" + s + "\"", pos_ < toks_.size() ? toks_[pos_].pos : 0);
    ++pos_;
  }

  FormulaPtr parse_or() {
    auto f = parse_unary();
    while (at_symbol("|")) {
      ++pos_;
      auto g = std::make_shared<Formula>();
      g->kind = Formula::Kind::Or;
      g->lhs = f;
      g->rhs = parse_unary();
      f = g;
    }
    return f;
  }

  FormulaPtr parse_unary() {
    if (at_symbol("!")) {
      ++pos_;
      auto f = std::make_shared<Formula>();
      f->kind = Formula::Kind::Not;
      f->lhs = parse_unary();
      return f;
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    if (at_symbol("(")) {
      ++pos_;
      auto f = parse_or();
      expect_symbol(")");
      return f;
    }
    if (at_symbol("<<")) return parse_quant();
    Token t = take();
    if (t.symbol) syntax_error("unexpected \"" + t.text + "\"", t.pos);
    auto f = std::make_shared<Formula>();
    if (t.text == "true") {
      f->kind = Formula::Kind::True;
    } else {
      f->kind = Formula::Kind::Atom;
      f->atom = t.text;
    }
    return f;
  }

  FormulaPtr parse_quant() {
    size_t start = toks_[pos_].pos;
    expect_symbol("<<");
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Quant;
    for (;;) {
      Token id = take();
      if (id.symbol) syntax_error("expected a player name", id.pos);
      f->coalition.push_back(id.text);
      if (at_symbol(",")) {
        ++pos_;
        continue;
      }
      break;
    }
    expect_symbol(">>");
    expect_symbol("^");
    Token hdr = take();
    if (hdr.symbol) syntax_error("expected randomisation/winning tag", hdr.pos);
    auto underscore = hdr.text.find('_');
    if (underscore == std::string::npos)
      syntax_error("expected \"_\" after randomisation type", hdr.pos);
    std::string rand = hdr.text.substr(0, underscore);
    std::string win = hdr.text.substr(underscore + 1);
    if (rand == "sh")
      f->rand = RandType::sh;
    else if (rand == "ind")
      f->rand = RandType::ind;
    else
      syntax_error("randomisation type must be sh or ind", hdr.pos);
    if (win == "sure") {
      f->win = WinCond::sure;
    } else if (win == "almost") {
      f->win = WinCond::almost;
    } else if (win == "limit") {
      syntax_error("the limit winning condition is outside the decidable fragment", hdr.pos);
    } else if (win.empty()) {
      expect_symbol(">");
      Token rat = take();
      auto t = parse_rational(rat.text);
      if (!t || *t < 0 || *t > 1)
        syntax_error("threshold must be a rational in [0,1]", rat.pos);
      f->win = WinCond::threshold;
      f->threshold = *t;
    } else {
      syntax_error("winning condition must be sure, almost or >t", hdr.pos);
    }

    if (at_word("X")) {
      ++pos_;
      f->path = PathOp::Next;
      f->pf = parse_or();
    } else if (at_word("G")) {
      ++pos_;
      if (f->win == WinCond::threshold)
        syntax_error("threshold safety (>t with G) is outside the decidable fragment", start);
      f->path = PathOp::Box;
      f->pf = parse_or();
    } else if (at_word("F")) {
      ++pos_;
      f->path = PathOp::Until;
      f->pf = std::make_shared<Formula>();  // true U φ
      f->pf->kind = Formula::Kind::True;
      f->pg = parse_or();
    } else {
      f->path = PathOp::Until;
      f->pf = parse_or();
      if (!at_word("U")) syntax_error("expected a path operator", pos_ < toks_.size() ? toks_[pos_].pos : start);
      ++pos_;
      f->pg = parse_or();
    }
    return f;
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  return Parser(tokenize(text)).parse();
}

// ------------------------------------------------------- sure-winning sets

std::vector<bool> cpre(const Game& h, const std::vector<bool>& X) {
  int S = h.state_count();
  std::vector<bool> out(static_cast<size_t>(S), false);
  for (int s = 0; s < S; ++s) {
    std::int64_t tc = h.team_joint_count(s);
    auto nb = static_cast<std::int64_t>(h.available[h.opponent()][s].size());
    for (std::int64_t tj = 0; tj < tc && !out[static_cast<size_t>(s)]; ++tj) {
      bool good = true;
      for (std::int64_t b = 0; b < nb && good; ++b)
        for (const auto& e : h.delta(s, tj * nb + b).support)
          if (!X[static_cast<size_t>(e.state)]) {
            good = false;
            break;
          }
      if (good) out[static_cast<size_t>(s)] = true;
    }
  }
  return out;
}

std::vector<bool> solve_sure_next(const Game& h, const std::vector<bool>& target) {
  return cpre(h, target);
}

std::vector<bool> solve_sure_box(const Game& h, const std::vector<bool>& pset) {
  std::vector<bool> X = pset;
  for (int round = 0; round <= h.state_count(); ++round) {
    auto pre = cpre(h, X);
    std::vector<bool> nx(X.size());
    bool changed = false;
    for (size_t s = 0; s < X.size(); ++s) {
      nx[s] = pset[s] && pre[s];
      changed |= nx[s] != X[s];
    }
    X = std::move(nx);
    if (!changed) break;
  }
  return X;
}

std::vector<bool> solve_sure_until(const Game& h, const std::vector<bool>& pset,
                                   const std::vector<bool>& qset) {
  std::vector<bool> X(qset.size(), false);
  for (int round = 0; round <= h.state_count(); ++round) {
    auto pre = cpre(h, X);
    std::vector<bool> nx(X.size());
    bool changed = false;
    for (size_t s = 0; s < X.size(); ++s) {
      nx[s] = qset[s] || (pset[s] && pre[s]);
      changed |= nx[s] != X[s];
    }
    X = std::move(nx);
    if (!changed) break;
  }
  return X;
}

// ------------------------------------------------------------- evaluation

namespace {

struct Sets {
  std::vector<bool> lower, upper;  // surely-true / possibly-true
};

Game quant_game(const Game& g, const std::vector<std::string>& coalition, RandType r) {
  std::vector<int> ids;
  for (const auto& name : coalition) {
    int p = g.player_index(name);
    if (p < 0) throw std::runtime_error("unknown coalition player \"" + name + "\"");
    ids.push_back(p);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Game h = set_coalition(g, ids);
  if (r == RandType::sh && h.team_size() > 1) h = merge_team(h);
  return h;
}

// States outside pset become absorbing; qset becomes the absorbing target.
Game until_game(const Game& h, const std::vector<bool>& pset,
                const std::vector<bool>& qset) {
  Game g2 = h;
  g2.is_target.assign(pset.size(), false);
  std::vector<int> keep;
  for (size_t s = 0; s < pset.size(); ++s) {
    g2.is_target[s] = qset[s];
    if (pset[s] || qset[s]) keep.push_back(static_cast<int>(s));
  }
  return absorbing_closure(restrict_absorbing(g2, keep));
}

std::vector<bool> almost_until(const Game& h, const std::vector<bool>& pset,
                               const std::vector<bool>& qset) {
  Game g2 = until_game(h, pset, qset);
  int S = g2.state_count();
  std::vector<bool> res(static_cast<size_t>(S), false);
  for (int s = 0; s < S; ++s)
    if (qset[static_cast<size_t>(s)]) res[static_cast<size_t>(s)] = true;
  for (int s = 0; s < S; ++s) {
    if (res[static_cast<size_t>(s)]) continue;
    if (!pset[static_cast<size_t>(s)]) continue;
    g2.initial = s;
    auto r = solve_almost_sure(g2);
    if (r.yes)  // every certified winning state wins from itself
      for (int w : r.certificate.winning) res[static_cast<size_t>(w)] = true;
  }
  return res;
}

// One-step value bounds per state against an indicator valuation.
void threshold_next(const Game& h, const std::vector<bool>& pset, const Rational& t,
                    const CheckBackends& be, std::vector<bool>& L, std::vector<bool>& U,
                    std::string& how) {
  int S = h.state_count();
  L.assign(static_cast<size_t>(S), false);
  U.assign(static_cast<size_t>(S), true);
  std::vector<double> v(static_cast<size_t>(S), 0.0);
  for (int s = 0; s < S; ++s)
    if (pset[static_cast<size_t>(s)]) v[static_cast<size_t>(s)] = 1.0;
  double td = to_double(t);
  bool exact = h.team_size() <= 1;
  how = exact ? "one-step exact matrix game" : "one-step local search";
  for (int s = 0; s < S; ++s) {
    LocalGame lg = build_local_game(h, s, v);
    double lo, hi;
    if (exact) {
      lo = hi = solve_shared(lg).value;
    } else {
      IndependentConfig local = be.local;
      local.seed = be.local.seed ^ static_cast<std::uint64_t>(s);
      lo = solve_independent(lg, local).value;
      hi = 1.0;
      if (be.solver) {
        double a = lo, b = std::min(1.0, solve_shared(lg).value + 1e-9);
        int guard = 30;
        bool trouble = false;
        while (b - a > 1e-6 && guard-- > 0) {
          double mid = 0.5 * (a + b);
          auto verdict = run_solver(emit_local_game_query(lg, mid), *be.solver);
          if (verdict.status == SmtStatus::sat)
            a = mid;
          else if (verdict.status == SmtStatus::unsat)
            b = mid;
          else {
            trouble = true;
            break;
          }
        }
        lo = a;
        if (!trouble) hi = b;
        how = "one-step solver bisection";
      }
    }
    L[static_cast<size_t>(s)] = lo > td;
    U[static_cast<size_t>(s)] = !(hi <= td);
  }
}

void threshold_until(const Game& h, const std::vector<bool>& pset,
                     const std::vector<bool>& qset, const Rational& t,
                     const CheckBackends& be, std::vector<bool>& L, std::vector<bool>& U,
                     std::string& how) {
  Game g2 = until_game(h, pset, qset);
  int S = g2.state_count();
  L.assign(static_cast<size_t>(S), false);
  U.assign(static_cast<size_t>(S), true);
  if (be.solver) {
    how = "exact existential-arithmetic solver";
    for (int s = 0; s < S; ++s) {
      g2.initial = s;
      auto verdict = decide_threshold_exact(g2, t, *be.solver);
      if (verdict.status == SmtStatus::sat) {
        L[static_cast<size_t>(s)] = true;
      } else if (verdict.status == SmtStatus::unsat) {
        U[static_cast<size_t>(s)] = false;
      }  // unknown/timeout keeps the gap open
    }
    return;
  }
  how = "value-iteration semi-decision";
  VIConfig cfg;
  cfg.mode = Mode::independent;  // coalition merging already happened for sh
  cfg.stop = be.stop;
  cfg.local = be.local;
  cfg.jobs = be.jobs;
  auto vi = value_iteration(g2, cfg);
  auto cert = certify(g2, vi.profile, cfg.stop);
  double td = to_double(t);
  for (int s = 0; s < S; ++s)
    L[static_cast<size_t>(s)] = cert[static_cast<size_t>(s)] > td;
}

Sets eval(const Game& g, const FormulaPtr& f, const CheckBackends& be,
          std::vector<std::string>& prov) {
  int S = g.state_count();
  Sets out;
  switch (f->kind) {
    case Formula::Kind::True:
      out.lower.assign(static_cast<size_t>(S), true);
      out.upper = out.lower;
      return out;
    case Formula::Kind::Atom: {
      out.lower.assign(static_cast<size_t>(S), false);
      for (int s = 0; s < S; ++s) {
        const auto& ls = g.labels[static_cast<size_t>(s)];
        if (std::find(ls.begin(), ls.end(), f->atom) != ls.end())
          out.lower[static_cast<size_t>(s)] = true;
      }
      out.upper = out.lower;
      prov.push_back(f->atom + ": labels");
      return out;
    }
    case Formula::Kind::Not: {
      Sets a = eval(g, f->lhs, be, prov);
      out.lower.resize(static_cast<size_t>(S));
      out.upper.resize(static_cast<size_t>(S));
      for (int s = 0; s < S; ++s) {
        out.lower[static_cast<size_t>(s)] = !a.upper[static_cast<size_t>(s)];
        out.upper[static_cast<size_t>(s)] = !a.lower[static_cast<size_t>(s)];
      }
      return out;
    }
    case Formula::Kind::Or: {
      Sets a = eval(g, f->lhs, be, prov);
      Sets b = eval(g, f->rhs, be, prov);
      out.lower.resize(static_cast<size_t>(S));
      out.upper.resize(static_cast<size_t>(S));
      for (int s = 0; s < S; ++s) {
        out.lower[static_cast<size_t>(s)] =
            a.lower[static_cast<size_t>(s)] || b.lower[static_cast<size_t>(s)];
        out.upper[static_cast<size_t>(s)] =
            a.upper[static_cast<size_t>(s)] || b.upper[static_cast<size_t>(s)];
      }
      return out;
    }
    case Formula::Kind::Quant:
      break;
  }

  Game h = quant_game(g, f->coalition, f->rand);
  Sets p = f->pf ? eval(g, f->pf, be, prov) : Sets{};
  Sets q = f->pg ? eval(g, f->pg, be, prov) : Sets{};
  bool p_tight = p.lower == p.upper;
  bool q_tight = f->path != PathOp::Until || q.lower == q.upper;
  std::string how;

  auto run = [&](const std::vector<bool>& ps, const std::vector<bool>& qs,
                 bool lower_pass, std::vector<bool>& L, std::vector<bool>& U) {
    switch (f->win) {
      case WinCond::sure:
        how = "pure controllable-predecessor fixpoint";
        if (f->path == PathOp::Next)
          L = U = solve_sure_next(h, ps);
        else if (f->path == PathOp::Box)
          L = U = solve_sure_box(h, ps);
        else
          L = U = solve_sure_until(h, ps, qs);
        return;
      case WinCond::almost:
        if (f->path == PathOp::Next) {
          how = "controllable predecessor (supports argument)";
          L = U = cpre(h, ps);
        } else if (f->path == PathOp::Box) {
          how = "almost-safety rewritten to sure-safety";
          L = U = solve_sure_box(h, ps);
        } else {
          how = "support encoding + embedded solver";
          L = U = almost_until(h, ps, qs);
        }
        return;
      case WinCond::threshold:
        if (f->path == PathOp::Next)
          threshold_next(h, ps, f->threshold, be, L, U, how);
        else
          threshold_until(h, ps, qs, f->threshold, be, L, U, how);
        (void)lower_pass;
        return;
    }
  };

  std::vector<bool> L1, U1;
  run(p.lower, q.lower, true, L1, U1);
  if (p_tight && q_tight) {
    out.lower = L1;
    out.upper = U1;
  } else {
    std::vector<bool> L2, U2;
    run(p.upper, q.upper, false, L2, U2);
    out.lower = L1;
    out.upper = U2;
  }
  prov.push_back(f->to_string() + ": " + how);
  return out;
}

}  // namespace

CheckResult satisfying_states(const Game& structure, const FormulaPtr& formula,
                              const CheckBackends& backends) {
  if (structure.labels.size() != structure.states.size())
    throw std::invalid_argument("structure is missing its label table");
  CheckResult res;
  Sets sets = eval(structure, formula, backends, res.provenance);
  int S = structure.state_count();
  res.verdict.resize(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    if (sets.lower[static_cast<size_t>(s)])
      res.verdict[static_cast<size_t>(s)] = Verdict::True;
    else if (!sets.upper[static_cast<size_t>(s)])
      res.verdict[static_cast<size_t>(s)] = Verdict::False;
    else
      res.verdict[static_cast<size_t>(s)] = Verdict::Unknown;
  }
  return res;
}

}  // namespace tg
