#pragma once

#include "tg/certificate.hpp"
#include "tg/game.hpp"

#include <map>
#include <string>
#include <vector>

namespace tg {

enum class RankEncoding { binary, unary };

/// Propositional encoding of almost-sure reachability. Variables: winning
/// flags w_s, rank bits per state, support flags u_{s,i,a}, plus Tseitin
/// auxiliaries. Satisfiable iff the team wins almost-surely from the initial
/// state (supports are all that matter; probabilities are irrelevant).
struct CnfInstance {
  int var_count = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS literals, no terminating 0
  std::map<std::string, int> names;       // named variable -> index

  // Structured lookups (indices into the solver's variable space).
  std::vector<int> w;                           // per state
  std::vector<std::vector<int>> rank_bits;      // per state (LSB first / order enc.)
  std::vector<std::vector<std::vector<int>>> u; // [team player][state][avail pos]
  RankEncoding encoding = RankEncoding::binary;

  int fresh(const std::string& name = "");
  void add(std::vector<int> clause);
};

CnfInstance encode(const Game& game, RankEncoding enc = RankEncoding::binary);

/// "p cnf V C" plus comment lines carrying the variable map.
std::string to_dimacs(const CnfInstance& cnf);

/// Comparator gadget: returns a literal true iff the unsigned value of
/// a_bits is strictly below that of b_bits (LSB first, equal widths),
/// appending its full biconditional Tseitin definition.
int emit_unsigned_less(CnfInstance& cnf, const std::vector<int>& a_bits,
                       const std::vector<int>& b_bits);

struct AlmostSureResult {
  bool yes = false;
  RankCertificate certificate;  // meaningful only on yes
};

/// Encode + embedded SAT solve + decode + independent verification.
/// A decoded certificate failing verification is an encoder bug and throws.
AlmostSureResult solve_almost_sure(const Game& game,
                                   RankEncoding enc = RankEncoding::binary);

struct RankOutcome {
  bool ok = false;
  std::vector<int> ranks;  // -1 where no finite rank was assigned
  std::string failure;     // first violation when !ok
};

/// Fixes per-player supports (supports[p][s], empty = state outside the
/// candidate winning set) and computes rank layers. Fails on a safety leak,
/// an initial state outside the set, or a reachable state with no finite
/// rank. Throws std::invalid_argument on supports outside availability.
RankOutcome compute_ranks(const Game& game,
                          const std::vector<std::vector<std::vector<int>>>& supports);

struct CertificateCheck {
  bool ok = true;
  std::string violation;
};

/// Semantic re-check of a certificate with exact supports: membership,
/// safety, progress, and rank consistency. Shares no code with encode().
CertificateCheck verify_certificate(const Game& game, const RankCertificate& cert);

/// Enumerates every support assignment (guard: ≤ 10⁶ combinations), prunes
/// each to its largest safe set, and tests ranks. The ground-truth oracle.
bool brute_force_almost_sure(const Game& game);

}  // namespace tg
