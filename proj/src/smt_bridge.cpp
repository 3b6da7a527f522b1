#include "tg/smt_bridge.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace tg {

namespace {

std::string smt_rat(const Rational& r) {
  bool neg = r < 0;
  Rational a = neg ? -r : r;
  std::ostringstream os;
  if (denominator(a) == 1)
    os << numerator(a);
  else
    os << "(/ " << numerator(a) << " " << denominator(a) << ")";
  if (neg) return "(- " + os.str() + ")";
  return os.str();
}

std::string smt_double(double x) { return smt_rat(rational_from_double(x)); }

bool is_absorbing(const Game& g, int s) {
  std::int64_t jc = g.joint_count(s);
  for (std::int64_t j = 0; j < jc; ++j) {
    const auto& d = g.delta(s, j);
    if (d.support.size() != 1 || d.support[0].state != s) return false;
  }
  return true;
}

}  // namespace

std::string SmtScript::render() const {
  std::string out;
  out += "(set-option :produce-models true)\n";
  out += "(set-logic QF_NRA)\n";
  for (const auto& d : decls) out += "(declare-const " + d + " Real)\n";
  for (const auto& a : assertions) out += "(assert " + a + ")\n";
  out += "(check-sat)\n(get-model)\n";
  return out;
}

SmtScript emit_threshold_formula(const Game& g, const Rational& t) {
  SmtScript sc;
  int S = g.state_count();
  auto vvar = [&](int s) { return "v_" + std::to_string(s); };
  auto xvar = [&](int s, int i, int a) {
    return "x_" + std::to_string(s) + "_" + std::to_string(i) + "_" + std::to_string(a);
  };

  sc.decls.push_back("lam");
  for (int s = 0; s < S; ++s) sc.decls.push_back(vvar(s));

  std::vector<bool> absorbing(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    absorbing[static_cast<size_t>(s)] = is_absorbing(g, s);
    if (g.is_target[s] || absorbing[static_cast<size_t>(s)]) continue;
    for (int i = 0; i < g.team_size(); ++i)
      for (int a : g.available[i][s]) sc.decls.push_back(xvar(s, i, a));
  }

  sc.assertions.push_back("(> lam 0)");
  sc.assertions.push_back("(< lam 1)");

  for (int s = 0; s < S; ++s) {
    if (g.is_target[s]) {
      sc.assertions.push_back("(= " + vvar(s) + " 1)");
      continue;
    }
    sc.assertions.push_back("(>= " + vvar(s) + " 0)");
    sc.assertions.push_back("(<= " + vvar(s) + " 1)");
  }

  for (int s = 0; s < S; ++s) {
    if (g.is_target[s] || absorbing[static_cast<size_t>(s)]) continue;
    for (int i = 0; i < g.team_size(); ++i) {
      std::string sum = "(+";
      for (int a : g.available[i][s]) {
        sc.assertions.push_back("(>= " + xvar(s, i, a) + " 0)");
        sc.assertions.push_back("(<= " + xvar(s, i, a) + " 1)");
        sum += " " + xvar(s, i, a);
      }
      sum += ")";
      if (g.available[i][s].size() == 1)
        sc.assertions.push_back("(= " + xvar(s, i, g.available[i][s][0]) + " 1)");
      else
        sc.assertions.push_back("(= " + sum + " 1)");
    }
  }

  for (int s = 0; s < S; ++s) {
    if (g.is_target[s]) continue;
    if (absorbing[static_cast<size_t>(s)]) {
      // Self-loop: the discounted constraint collapses to v_s <= lam*v_s.
      sc.assertions.push_back("(<= " + vvar(s) + " (* lam " + vvar(s) + "))");
      continue;
    }
    std::int64_t tc = g.team_joint_count(s);
    auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());
    for (std::int64_t b = 0; b < nb; ++b) {
      std::string rhs = "(+";
      for (std::int64_t tj = 0; tj < tc; ++tj) {
        std::int64_t code = tj * nb + b;
        auto local = g.joint_decode(s, code);
        std::string term = "(*";
        for (int i = 0; i < g.team_size(); ++i)
          term += " " + xvar(s, i, g.available[i][s][local[i]]);
        std::string inner = "(+";
        for (const auto& e : g.delta(s, code).support)
          inner += " (* " + smt_rat(e.prob) + " " + vvar(e.state) + ")";
        inner += ")";
        term += " " + inner + ")";
        rhs += " " + term;
      }
      rhs += ")";
      sc.assertions.push_back("(<= " + vvar(s) + " (* lam " + rhs + "))");
    }
  }

  sc.assertions.push_back("(> " + vvar(g.initial) + " " + smt_rat(t) + ")");
  return sc;
}

SmtScript emit_local_game_query(const LocalGame& lg, double c) {
  SmtScript sc;
  size_t m = lg.team_sizes.size();
  auto xvar = [](size_t p, int k) {
    return "x_" + std::to_string(p) + "_" + std::to_string(k);
  };
  for (size_t p = 0; p < m; ++p) {
    std::string sum = "(+";
    for (int k = 0; k < lg.team_sizes[p]; ++k) {
      sc.decls.push_back(xvar(p, k));
      sc.assertions.push_back("(>= " + xvar(p, k) + " 0)");
      sc.assertions.push_back("(<= " + xvar(p, k) + " 1)");
      sum += " " + xvar(p, k);
    }
    sum += ")";
    sc.assertions.push_back(lg.team_sizes[p] == 1
                                ? "(= " + xvar(p, 0) + " 1)"
                                : "(= " + sum + " 1)");
  }
  std::int64_t J = lg.team_joint_count();
  for (int b = 0; b < lg.opp_count; ++b) {
    std::string sum = "(+";
    for (std::int64_t j = 0; j < J; ++j) {
      std::string term = "(*";
      std::int64_t code = j;
      std::vector<int> local(m);
      for (int p = static_cast<int>(m) - 1; p >= 0; --p) {
        local[static_cast<size_t>(p)] = static_cast<int>(code % lg.team_sizes[static_cast<size_t>(p)]);
        code /= lg.team_sizes[static_cast<size_t>(p)];
      }
      for (size_t p = 0; p < m; ++p) term += " " + xvar(p, local[p]);
      term += " " + smt_double(lg.V[static_cast<size_t>(j)][static_cast<size_t>(b)]) + ")";
      sum += " " + term;
    }
    sum += ")";
    sc.assertions.push_back("(>= " + sum + " " + smt_double(c) + ")");
  }
  return sc;
}

namespace {

// Minimal s-expression reader for (get-model) output.
struct Sexp {
  std::string atom;
  std::vector<Sexp> kids;
  bool is_atom() const { return kids.empty() && !atom.empty(); }
};

Sexp parse_sexp(const std::string& s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  Sexp node;
  if (i >= s.size()) return node;
  if (s[i] == '(') {
    ++i;
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size() || s[i] == ')') {
        if (i < s.size()) ++i;
        return node;
      }
      node.kids.push_back(parse_sexp(s, i));
    }
  }
  size_t start = i;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
         s[i] != '(' && s[i] != ')')
    ++i;
  node.atom = s.substr(start, i - start);
  return node;
}

std::optional<Rational> eval_value(const Sexp& e) {
  if (e.is_atom()) return parse_rational(e.atom);
  if (e.kids.empty()) return std::nullopt;
  const auto& op = e.kids[0].atom;
  if (op == "-" && e.kids.size() == 2) {
    auto v = eval_value(e.kids[1]);
    if (v) return -*v;
    return std::nullopt;
  }
  if (op == "/" && e.kids.size() == 3) {
    auto a = eval_value(e.kids[1]);
    auto b = eval_value(e.kids[2]);
    if (a && b && *b != 0) return *a / *b;
    return std::nullopt;
  }
  return std::nullopt;
}

void collect_model(const Sexp& e, std::map<std::string, Rational>& model) {
  if (e.kids.size() >= 5 && e.kids[0].atom == "define-fun") {
    auto v = eval_value(e.kids[4]);
    if (v) model[e.kids[1].atom] = *v;
    return;
  }
  for (const auto& k : e.kids) collect_model(k, model);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s)
    out += (c == '\'') ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

}  // namespace

std::optional<SolverEndpoint> SolverEndpoint::from_env() {
  const char* path = std::getenv("TG_SMT_SOLVER");
  if (!path || !*path) return std::nullopt;
  SolverEndpoint ep;
  ep.path = path;
  if (const char* args = std::getenv("TG_SMT_ARGS")) {
    std::istringstream ss(args);
    std::string a;
    while (ss >> a) ep.args.push_back(a);
  }
  if (const char* to = std::getenv("TG_SMT_TIMEOUT")) ep.timeout_sec = std::atof(to);
  return ep;
}

SolverVerdict run_solver(const SmtScript& script, const SolverEndpoint& solver) {
  SolverVerdict out;
  char in_tpl[] = "/tmp/tg_smt_XXXXXX";
  char out_tpl[] = "/tmp/tg_smt_out_XXXXXX";
  int in_fd = mkstemp(in_tpl), out_fd = mkstemp(out_tpl);
  if (in_fd < 0 || out_fd < 0) {
    out.detail = "cannot create temp files";
    return out;
  }
  close(out_fd);
  {
    std::string text = script.render();
    std::ofstream f(in_tpl);
    f << text;
  }
  close(in_fd);

  std::string cmd;
  if (access("/usr/bin/timeout", X_OK) == 0 && solver.timeout_sec > 0)
    cmd = "/usr/bin/timeout " + std::to_string(solver.timeout_sec) + "s ";
  cmd += shell_quote(solver.path);
  bool placed = false;
  for (const auto& a : solver.args) {
    std::string arg = a;
    auto pos = arg.find("{file}");
    if (pos != std::string::npos) {
      arg.replace(pos, 6, in_tpl);
      placed = true;
    }
    cmd += " " + shell_quote(arg);
  }
  if (!placed) cmd += " " + shell_quote(in_tpl);
  cmd += " > " + std::string(out_tpl) + " 2>&1";

  int rc = std::system(cmd.c_str());
  std::string text;
  {
    std::ifstream f(out_tpl);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  std::remove(in_tpl);
  std::remove(out_tpl);

  int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  if (exit_code == 124) {
    out.status = SmtStatus::timeout;
    return out;
  }
  if (exit_code == 127 || rc == -1) {
    out.status = SmtStatus::error;
    out.detail = "solver not found or failed to launch: " + solver.path;
    return out;
  }

  std::istringstream lines(text);
  std::string line;
  size_t model_start = std::string::npos;
  size_t offset = 0;
  while (std::getline(lines, line)) {
    std::string trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (trimmed == "sat") {
      out.status = SmtStatus::sat;
      model_start = offset + line.size();
    } else if (trimmed == "unsat") {
      out.status = SmtStatus::unsat;
      return out;
    } else if (trimmed == "unknown") {
      out.status = SmtStatus::unknown;
      return out;
    }
    offset += line.size() + 1;
    if (model_start != std::string::npos) break;
  }
  if (out.status != SmtStatus::sat) {
    out.status = SmtStatus::error;
    out.detail = "unrecognized solver output:\n" + text.substr(0, 500);
    return out;
  }
  std::string rest = text.substr(std::min(model_start, text.size()));
  size_t i = 0;
  while (i < rest.size()) {
    Sexp e = parse_sexp(rest, i);
    collect_model(e, out.model);
    while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
    if (i < rest.size() && rest[i] != '(') break;
  }
  return out;
}

SolverVerdict decide_threshold_exact(const Game& g, const Rational& t,
                                     const SolverEndpoint& solver) {
  return run_solver(emit_threshold_formula(g, t), solver);
}

BisectResult bisect_value(const Game& g, double precision, const SolverEndpoint& solver) {
  if (precision <= 0) throw std::invalid_argument("precision must be positive");
  BisectResult r;
  while (r.hi - r.lo > precision) {
    double mid = 0.5 * (r.lo + r.hi);
    auto verdict = decide_threshold_exact(g, rational_from_double(mid), solver);
    if (verdict.status == SmtStatus::sat)
      r.lo = mid;
    else if (verdict.status == SmtStatus::unsat)
      r.hi = mid;
    else {
      r.partial = true;
      break;
    }
  }
  return r;
}

MemorylessProfile profile_from_model(const Game& g,
                                     const std::map<std::string, Rational>& model) {
  MemorylessProfile mp = MemorylessProfile::uniform(g);
  for (int s = 0; s < g.state_count(); ++s) {
    if (g.is_target[s]) continue;
    for (int i = 0; i < g.team_size(); ++i) {
      const auto& av = g.available[i][s];
      std::vector<Rational> dist(av.size(), Rational(0));
      bool any = false;
      Rational sum = 0;
      for (size_t k = 0; k < av.size(); ++k) {
        auto it = model.find("x_" + std::to_string(s) + "_" + std::to_string(i) +
                             "_" + std::to_string(av[k]));
        if (it == model.end()) continue;
        any = true;
        Rational v = it->second < 0 ? Rational(0) : it->second;
        sum += v;
        dist[k] = v;
      }
      if (!any || sum == 0) continue;
      if (sum != 1)
        for (auto& d : dist) d /= sum;
      mp.probs[static_cast<size_t>(i)][static_cast<size_t>(s)] = std::move(dist);
    }
  }
  return mp;
}

}  // namespace tg
