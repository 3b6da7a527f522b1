#pragma once

#include "tg/certificate.hpp"
#include "tg/game.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace tg {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Decodes a game document (JSON, version 1) and validates it.
/// Throws ParseError with a path-qualified message on any syntax,
/// reference, or validation failure.
Game parse_game(const std::string& text);

/// Canonical rendering: object keys sorted, probabilities as "p/q",
/// opponent listed last. parse_game(serialize_game(g)) is structurally
/// identical to g, and re-serialization is byte-identical.
std::string serialize_game(const Game& game);

Game load_game(const std::string& path);
void save_text(const std::string& path, const std::string& text);

/// One line per state: "<state> <value>" with 6 decimal digits.
std::string format_valuation(const Game& game, const std::vector<double>& v);

std::string serialize_profile(const Game& game, const MemorylessProfile& p);
MemorylessProfile parse_profile(const Game& game, const std::string& text);

std::string serialize_certificate(const Game& game, const RankCertificate& c);

}  // namespace tg
