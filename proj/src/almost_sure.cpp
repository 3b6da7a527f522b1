#include "tg/almost_sure.hpp"

#include "tg/sat_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace tg {

int CnfInstance::fresh(const std::string& name) {
  ++var_count;
  if (!name.empty()) names[name] = var_count;
  return var_count;
}

void CnfInstance::add(std::vector<int> clause) { clauses.push_back(std::move(clause)); }

int emit_unsigned_less(CnfInstance& cnf, const std::vector<int>& a_bits,
                       const std::vector<int>& b_bits) {
  if (a_bits.size() != b_bits.size() || a_bits.empty())
    throw std::invalid_argument("comparator width mismatch");
  size_t L = a_bits.size();

  // e_j <-> (a_j <-> b_j)
  std::vector<int> e(L);
  for (size_t j = 0; j < L; ++j) {
    e[j] = cnf.fresh();
    cnf.add({-e[j], a_bits[j], -b_bits[j]});
    cnf.add({-e[j], -a_bits[j], b_bits[j]});
    cnf.add({e[j], a_bits[j], b_bits[j]});
    cnf.add({e[j], -a_bits[j], -b_bits[j]});
  }
  // d_i <-> (!a_i & b_i & AND_{j>i} e_j)
  std::vector<int> d(L);
  for (size_t i = 0; i < L; ++i) {
    d[i] = cnf.fresh();
    cnf.add({-d[i], -a_bits[i]});
    cnf.add({-d[i], b_bits[i]});
    std::vector<int> back{d[i], a_bits[i], -b_bits[i]};
    for (size_t j = i + 1; j < L; ++j) {
      cnf.add({-d[i], e[j]});
      back.push_back(-e[j]);
    }
    cnf.add(std::move(back));
  }
  // out <-> OR d_i
  int out = cnf.fresh();
  std::vector<int> any{-out};
  for (size_t i = 0; i < L; ++i) {
    any.push_back(d[i]);
    cnf.add({out, -d[i]});
  }
  cnf.add(std::move(any));
  return out;
}

namespace {

// lt literal for "rank(t) < rank(s)" under the order (unary) encoding:
// exists k with rank(s) >= k and not rank(t) >= k.
int emit_order_less(CnfInstance& cnf, const std::vector<int>& t_ge,
                    const std::vector<int>& s_ge) {
  size_t L = s_ge.size();
  std::vector<int> d(L);
  for (size_t k = 0; k < L; ++k) {
    d[k] = cnf.fresh();
    cnf.add({-d[k], s_ge[k]});
    cnf.add({-d[k], -t_ge[k]});
    cnf.add({d[k], -s_ge[k], t_ge[k]});
  }
  int out = cnf.fresh();
  std::vector<int> any{-out};
  for (size_t k = 0; k < L; ++k) {
    any.push_back(d[k]);
    cnf.add({out, -d[k]});
  }
  cnf.add(std::move(any));
  return out;
}

}  // namespace

CnfInstance encode(const Game& g, RankEncoding enc) {
  CnfInstance cnf;
  cnf.encoding = enc;
  int S = g.state_count();
  int L = enc == RankEncoding::binary
              ? std::max(1, static_cast<int>(std::ceil(std::log2(S + 1))))
              : S;

  cnf.w.resize(static_cast<size_t>(S));
  cnf.rank_bits.resize(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    cnf.w[static_cast<size_t>(s)] = cnf.fresh("w_" + g.states[s]);
    for (int j = 0; j < L; ++j)
      cnf.rank_bits[static_cast<size_t>(s)].push_back(
          cnf.fresh((enc == RankEncoding::binary ? "b_" : "ge_") + g.states[s] +
                    "_" + std::to_string(j)));
  }
  cnf.u.resize(static_cast<size_t>(g.team_size()));
  for (int p = 0; p < g.team_size(); ++p) {
    cnf.u[static_cast<size_t>(p)].resize(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s)
      for (int a : g.available[p][s])
        cnf.u[static_cast<size_t>(p)][static_cast<size_t>(s)].push_back(
            cnf.fresh("u_" + g.players[p] + "_" + g.states[s] + "_" + g.actions[p][a]));
  }

  cnf.add({cnf.w[static_cast<size_t>(g.initial)]});

  for (int s = 0; s < S; ++s) {
    const auto& bits = cnf.rank_bits[static_cast<size_t>(s)];
    if (enc == RankEncoding::unary)  // monotone chain: ge_{k+1} -> ge_k
      for (int j = 1; j < L; ++j) cnf.add({-bits[static_cast<size_t>(j)], bits[static_cast<size_t>(j - 1)]});
    if (g.is_target[s]) {
      cnf.add({cnf.w[static_cast<size_t>(s)]});
      if (enc == RankEncoding::binary)
        for (int j = 0; j < L; ++j) cnf.add({-bits[static_cast<size_t>(j)]});
      else
        cnf.add({-bits[0]});
    } else {
      // winning non-target states have nonzero rank
      std::vector<int> nz{-cnf.w[static_cast<size_t>(s)]};
      if (enc == RankEncoding::binary)
        for (int j = 0; j < L; ++j) nz.push_back(bits[static_cast<size_t>(j)]);
      else
        nz.push_back(bits[0]);
      cnf.add(std::move(nz));
    }
    // non-empty supports inside the winning set
    for (int p = 0; p < g.team_size(); ++p) {
      std::vector<int> cl{-cnf.w[static_cast<size_t>(s)]};
      for (int uv : cnf.u[static_cast<size_t>(p)][static_cast<size_t>(s)]) cl.push_back(uv);
      cnf.add(std::move(cl));
    }
  }

  // Memoized rank comparator per ordered (t, s) pair.
  std::map<std::pair<int, int>, int> lt_cache;
  auto lt_var = [&](int t, int s) {
    auto key = std::make_pair(t, s);
    auto it = lt_cache.find(key);
    if (it != lt_cache.end()) return it->second;
    int v = enc == RankEncoding::binary
                ? emit_unsigned_less(cnf, cnf.rank_bits[static_cast<size_t>(t)],
                                     cnf.rank_bits[static_cast<size_t>(s)])
                : emit_order_less(cnf, cnf.rank_bits[static_cast<size_t>(t)],
                                  cnf.rank_bits[static_cast<size_t>(s)]);
    lt_cache.emplace(key, v);
    return v;
  };

  for (int s = 0; s < S; ++s) {
    std::int64_t tc = g.team_joint_count(s);
    auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());

    // Safety: support joint actions never leave the winning set.
    for (std::int64_t tj = 0; tj < tc; ++tj) {
      auto local = g.joint_decode(s, tj * nb);  // team digits; opponent slot 0
      for (std::int64_t b = 0; b < nb; ++b) {
        for (const auto& e : g.delta(s, tj * nb + b).support) {
          if (e.state == s) continue;  // self-loop successor: clause is tautological
          std::vector<int> cl{-cnf.w[static_cast<size_t>(s)]};
          for (int p = 0; p < g.team_size(); ++p)
            cl.push_back(-cnf.u[static_cast<size_t>(p)][static_cast<size_t>(s)][static_cast<size_t>(local[p])]);
          cl.push_back(cnf.w[static_cast<size_t>(e.state)]);
          cnf.add(std::move(cl));
        }
      }
    }

    // Progress: every opponent action admits a support joint action that
    // moves to a strictly lower rank with positive probability.
    if (g.is_target[s]) continue;
    for (std::int64_t b = 0; b < nb; ++b) {
      std::vector<int> big{-cnf.w[static_cast<size_t>(s)]};
      for (std::int64_t tj = 0; tj < tc; ++tj) {
        auto local = g.joint_decode(s, tj * nb);
        int aux = cnf.fresh();
        for (int p = 0; p < g.team_size(); ++p)
          cnf.add({-aux, cnf.u[static_cast<size_t>(p)][static_cast<size_t>(s)][static_cast<size_t>(local[p])]});
        std::vector<int> lower{-aux};
        for (const auto& e : g.delta(s, tj * nb + b).support)
          if (e.state != s) lower.push_back(lt_var(e.state, s));
        cnf.add(std::move(lower));
        big.push_back(aux);
      }
      cnf.add(std::move(big));
    }
  }
  return cnf;
}

std::string to_dimacs(const CnfInstance& cnf) {
  std::string out;
  for (const auto& [name, idx] : cnf.names)
    out += "c var " + std::to_string(idx) + " = " + name + "\n";
  out += "p cnf " + std::to_string(cnf.var_count) + " " +
         std::to_string(cnf.clauses.size()) + "\n";
  for (const auto& c : cnf.clauses) {
    for (int l : c) out += std::to_string(l) + " ";
    out += "0\n";
  }
  return out;
}

namespace {

RankCertificate decode(const Game& g, const CnfInstance& cnf,
                       const std::vector<bool>& model) {
  int S = g.state_count();
  RankCertificate cert;
  cert.rank.assign(static_cast<size_t>(S), -1);
  cert.supports.assign(static_cast<size_t>(g.team_size()),
                       std::vector<std::vector<int>>(static_cast<size_t>(S)));
  for (int s = 0; s < S; ++s) {
    if (!model[static_cast<size_t>(cnf.w[static_cast<size_t>(s)])]) continue;
    cert.winning.push_back(s);
    const auto& bits = cnf.rank_bits[static_cast<size_t>(s)];
    int r = 0;
    if (cnf.encoding == RankEncoding::binary) {
      for (size_t j = 0; j < bits.size(); ++j)
        if (model[static_cast<size_t>(bits[j])]) r |= 1 << j;
    } else {
      for (int bv : bits)
        if (model[static_cast<size_t>(bv)]) ++r;
    }
    cert.rank[static_cast<size_t>(s)] = r;
    for (int p = 0; p < g.team_size(); ++p) {
      const auto& av = g.available[p][s];
      for (size_t k = 0; k < av.size(); ++k)
        if (model[static_cast<size_t>(cnf.u[static_cast<size_t>(p)][static_cast<size_t>(s)][k])])
          cert.supports[static_cast<size_t>(p)][static_cast<size_t>(s)].push_back(av[k]);
    }
  }
  return cert;
}

}  // namespace

AlmostSureResult solve_almost_sure(const Game& g, RankEncoding enc) {
  CnfInstance cnf = encode(g, enc);
  sat::Solver solver;
  solver.ensure_vars(cnf.var_count);
  for (const auto& c : cnf.clauses) solver.add_clause(c);
  auto model = solver.solve();
  AlmostSureResult res;
  if (!model) return res;
  res.certificate = decode(g, cnf, *model);
  auto check = verify_certificate(g, res.certificate);
  if (!check.ok)
    throw std::logic_error("decoded certificate failed verification: " + check.violation);
  res.yes = true;
  return res;
}

namespace {

// Enumerates the product of support position-lists; returns false to stop.
template <typename F>
void for_each_support_joint(const std::vector<std::vector<int>>& positions, F&& f) {
  std::vector<size_t> idx(positions.size(), 0);
  for (;;) {
    std::vector<int> pick(positions.size());
    for (size_t p = 0; p < positions.size(); ++p) pick[p] = positions[p][idx[p]];
    f(pick);
    int k = static_cast<int>(positions.size()) - 1;
    while (k >= 0) {
      if (++idx[static_cast<size_t>(k)] < positions[static_cast<size_t>(k)].size()) break;
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) return;
  }
}

}  // namespace

RankOutcome compute_ranks(const Game& g,
                          const std::vector<std::vector<std::vector<int>>>& supports) {
  int S = g.state_count();
  int m = g.team_size();
  if (static_cast<int>(supports.size()) != m)
    throw std::invalid_argument("supports player count mismatch");

  // Availability positions per (p, s); validates membership.
  std::vector<std::vector<std::vector<int>>> pos(static_cast<size_t>(m));
  std::vector<bool> in_w(static_cast<size_t>(S), true);
  for (int p = 0; p < m; ++p) {
    pos[static_cast<size_t>(p)].resize(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s) {
      const auto& av = g.available[p][s];
      for (int a : supports[static_cast<size_t>(p)][static_cast<size_t>(s)]) {
        auto it = std::find(av.begin(), av.end(), a);
        if (it == av.end())
          throw std::invalid_argument("support references unavailable action");
        pos[static_cast<size_t>(p)][static_cast<size_t>(s)].push_back(
            static_cast<int>(it - av.begin()));
      }
      if (pos[static_cast<size_t>(p)][static_cast<size_t>(s)].empty())
        in_w[static_cast<size_t>(s)] = false;
    }
  }

  RankOutcome out;
  out.ranks.assign(static_cast<size_t>(S), -1);

  auto joint_positions = [&](int s) {
    std::vector<std::vector<int>> ps;
    for (int p = 0; p < m; ++p) ps.push_back(pos[static_cast<size_t>(p)][static_cast<size_t>(s)]);
    return ps;
  };

  // Safety inside the candidate set.
  for (int s = 0; s < S; ++s) {
    if (!in_w[static_cast<size_t>(s)]) continue;
    bool leak = false;
    auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());
    for_each_support_joint(joint_positions(s), [&](const std::vector<int>& pick) {
      for (std::int64_t b = 0; b < nb && !leak; ++b) {
        std::vector<int> local(pick);
        local.push_back(static_cast<int>(b));
        for (const auto& e : g.delta(s, g.joint_code(s, local)).support)
          if (!in_w[static_cast<size_t>(e.state)]) leak = true;
      }
    });
    if (leak) {
      out.failure = "safety violated at " + g.states[s];
      return out;
    }
  }

  for (int s = 0; s < S; ++s)
    if (in_w[static_cast<size_t>(s)] && g.is_target[s]) out.ranks[static_cast<size_t>(s)] = 0;

  // Layered rank assignment.
  for (int round = 1; round <= S; ++round) {
    std::vector<int> newly;
    for (int s = 0; s < S; ++s) {
      if (!in_w[static_cast<size_t>(s)] || out.ranks[static_cast<size_t>(s)] != -1) continue;
      auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());
      bool all_b = true;
      for (std::int64_t b = 0; b < nb && all_b; ++b) {
        bool some_joint = false;
        for_each_support_joint(joint_positions(s), [&](const std::vector<int>& pick) {
          if (some_joint) return;
          std::vector<int> local(pick);
          local.push_back(static_cast<int>(b));
          for (const auto& e : g.delta(s, g.joint_code(s, local)).support)
            if (out.ranks[static_cast<size_t>(e.state)] != -1) {
              some_joint = true;
              return;
            }
        });
        if (!some_joint) all_b = false;
      }
      if (all_b) newly.push_back(s);
    }
    if (newly.empty()) break;
    for (int s : newly) out.ranks[static_cast<size_t>(s)] = round;
  }

  if (!in_w[static_cast<size_t>(g.initial)]) {
    out.failure = "initial state outside candidate winning set";
    return out;
  }

  // Every state reachable from the initial state (any support action, any
  // opponent action) must carry a finite rank.
  std::vector<bool> seen(static_cast<size_t>(S), false);
  std::deque<int> queue{g.initial};
  seen[static_cast<size_t>(g.initial)] = true;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    if (out.ranks[static_cast<size_t>(s)] == -1) {
      out.failure = "no finite rank at reachable state " + g.states[s];
      return out;
    }
    if (g.is_target[s]) continue;
    auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());
    for_each_support_joint(joint_positions(s), [&](const std::vector<int>& pick) {
      for (std::int64_t b = 0; b < nb; ++b) {
        std::vector<int> local(pick);
        local.push_back(static_cast<int>(b));
        for (const auto& e : g.delta(s, g.joint_code(s, local)).support)
          if (!seen[static_cast<size_t>(e.state)]) {
            seen[static_cast<size_t>(e.state)] = true;
            queue.push_back(e.state);
          }
      }
    });
  }

  out.ok = true;
  return out;
}

CertificateCheck verify_certificate(const Game& g, const RankCertificate& cert) {
  CertificateCheck res;
  auto fail = [&](const std::string& what) {
    res.ok = false;
    res.violation = what;
    return res;
  };
  int S = g.state_count();
  int m = g.team_size();
  std::vector<bool> in_w(static_cast<size_t>(S), false);
  for (int s : cert.winning) {
    if (s < 0 || s >= S) return fail("winning set references unknown state");
    in_w[static_cast<size_t>(s)] = true;
  }
  if (!in_w[static_cast<size_t>(g.initial)]) return fail("initial state not in winning set");
  if (static_cast<int>(cert.rank.size()) != S) return fail("rank table size mismatch");
  if (static_cast<int>(cert.supports.size()) != m) return fail("supports player count mismatch");

  for (int s : cert.winning) {
    int r = cert.rank[static_cast<size_t>(s)];
    if (r < 0) return fail("missing rank at " + g.states[s]);
    if ((r == 0) != g.is_target[s])
      return fail("rank-consistency violated at " + g.states[s]);
    for (int p = 0; p < m; ++p) {
      const auto& sup = cert.supports[static_cast<size_t>(p)][static_cast<size_t>(s)];
      if (sup.empty()) return fail("empty support at " + g.states[s]);
      const auto& av = g.available[p][s];
      for (int a : sup)
        if (std::find(av.begin(), av.end(), a) == av.end())
          return fail("support outside availability at " + g.states[s]);
    }
  }

  for (int s : cert.winning) {
    std::vector<std::vector<int>> positions(static_cast<size_t>(m));
    for (int p = 0; p < m; ++p) {
      const auto& av = g.available[p][s];
      for (int a : cert.supports[static_cast<size_t>(p)][static_cast<size_t>(s)])
        positions[static_cast<size_t>(p)].push_back(static_cast<int>(
            std::find(av.begin(), av.end(), a) - av.begin()));
    }
    auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());

    bool safety_bad = false;
    for_each_support_joint(positions, [&](const std::vector<int>& pick) {
      for (std::int64_t b = 0; b < nb; ++b) {
        std::vector<int> local(pick);
        local.push_back(static_cast<int>(b));
        for (const auto& e : g.delta(s, g.joint_code(s, local)).support)
          if (!in_w[static_cast<size_t>(e.state)]) safety_bad = true;
      }
    });
    if (safety_bad) return fail("safety violated at " + g.states[s]);

    if (g.is_target[s]) continue;
    int r = cert.rank[static_cast<size_t>(s)];
    for (std::int64_t b = 0; b < nb; ++b) {
      bool progress = false;
      for_each_support_joint(positions, [&](const std::vector<int>& pick) {
        if (progress) return;
        std::vector<int> local(pick);
        local.push_back(static_cast<int>(b));
        for (const auto& e : g.delta(s, g.joint_code(s, local)).support) {
          int rt = cert.rank[static_cast<size_t>(e.state)];
          if (rt >= 0 && rt < r) {
            progress = true;
            return;
          }
        }
      });
      if (!progress)
        return fail("progress violated at " + g.states[s] + " against opponent action " +
                    g.actions[g.opponent()][g.available[g.opponent()][s][static_cast<size_t>(b)]]);
    }
  }
  return res;
}

bool brute_force_almost_sure(const Game& g) {
  int S = g.state_count();
  int m = g.team_size();

  double combos = 1.0;
  for (int p = 0; p < m; ++p)
    for (int s = 0; s < S; ++s)
      combos *= std::pow(2.0, static_cast<double>(g.available[p][s].size())) - 1.0;
  if (combos > 1e6) throw std::invalid_argument("support enumeration guard exceeded");

  // Odometer over non-empty availability subsets per (player, state) cell.
  struct Cell {
    int p, s, count;
    unsigned mask;
  };
  std::vector<Cell> cells;
  for (int p = 0; p < m; ++p)
    for (int s = 0; s < S; ++s)
      cells.push_back({p, s, static_cast<int>(g.available[p][s].size()), 1u});

  for (;;) {
    // Largest safe set for the chosen supports.
    std::vector<bool> in_w(static_cast<size_t>(S), true);
    auto support_positions = [&](int s) {
      std::vector<std::vector<int>> positions(static_cast<size_t>(m));
      for (const auto& c : cells)
        if (c.s == s)
          for (int k = 0; k < c.count; ++k)
            if (c.mask & (1u << k)) positions[static_cast<size_t>(c.p)].push_back(k);
      return positions;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < S; ++s) {
        if (!in_w[static_cast<size_t>(s)]) continue;
        auto nb = static_cast<std::int64_t>(g.available[g.opponent()][s].size());
        bool leak = false;
        for_each_support_joint(support_positions(s), [&](const std::vector<int>& pick) {
          for (std::int64_t b = 0; b < nb && !leak; ++b) {
            std::vector<int> local(pick);
            local.push_back(static_cast<int>(b));
            for (const auto& e : g.delta(s, g.joint_code(s, local)).support)
              if (!in_w[static_cast<size_t>(e.state)]) leak = true;
          }
        });
        if (leak) {
          in_w[static_cast<size_t>(s)] = false;
          changed = true;
        }
      }
    }

    if (in_w[static_cast<size_t>(g.initial)]) {
      std::vector<std::vector<std::vector<int>>> supports(
          static_cast<size_t>(m),
          std::vector<std::vector<int>>(static_cast<size_t>(S)));
      for (const auto& c : cells) {
        if (!in_w[static_cast<size_t>(c.s)]) continue;
        for (int k = 0; k < c.count; ++k)
          if (c.mask & (1u << k))
            supports[static_cast<size_t>(c.p)][static_cast<size_t>(c.s)].push_back(
                g.available[c.p][c.s][static_cast<size_t>(k)]);
      }
      if (compute_ranks(g, supports).ok) return true;
    }

    // Advance the odometer.
    size_t i = 0;
    for (; i < cells.size(); ++i) {
      unsigned limit = (1u << cells[i].count) - 1u;
      if (cells[i].mask < limit) {
        ++cells[i].mask;
        break;
      }
      cells[i].mask = 1u;
    }
    if (i == cells.size()) return false;
  }
}

}  // namespace tg
