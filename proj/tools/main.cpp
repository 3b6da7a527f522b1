#include "tg/almost_sure.hpp"
#include "tg/bench_gen.hpp"
#include "tg/iratl.hpp"
#include "tg/model_io.hpp"
#include "tg/smt_bridge.hpp"
#include "tg/threshold_vi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitUnknown = 10;

struct CommonOpts {
  std::string input;
  std::string report;
  std::string mode = "ind";
  std::string backend = "opt";
  double eps = 1e-4;
  int max_iters = 10000;
  int restarts = 16;
  unsigned long long seed = 0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string solver_path;
  std::string solver_args;
  double solver_timeout = 60.0;
};

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--solver", o.solver_path, "SMT solver executable (env TG_SMT_SOLVER)");
  cmd->add_option("--solver-args", o.solver_args,
                  "space-separated solver arguments; {file} expands to the script path");
  cmd->add_option("--solver-timeout", o.solver_timeout, "solver wall clock limit, seconds");
}

void add_vi_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--mode", o.mode, "randomisation mode")
      ->check(CLI::IsMember({"ind", "sh"}));
  cmd->add_option("--backend", o.backend, "local solve backend")
      ->check(CLI::IsMember({"opt", "smt", "hybrid"}));
  cmd->add_option("--eps", o.eps, "iteration stop tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", o.restarts, "local search restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "deterministic base seed");
  cmd->add_option("--jobs", o.jobs, "max concurrent per-state solves")
      ->check(CLI::PositiveNumber);
  add_solver_flags(cmd, o);
}

std::optional<tg::SolverEndpoint> endpoint_from(const CommonOpts& o) {
  if (!o.solver_path.empty()) {
    tg::SolverEndpoint ep;
    ep.path = o.solver_path;
    std::istringstream in(o.solver_args);
    std::string tok;
    while (in >> tok) ep.args.push_back(tok);
    ep.timeout_sec = o.solver_timeout;
    return ep;
  }
  return tg::SolverEndpoint::from_env();
}

tg::VIConfig vi_config(const CommonOpts& o) {
  tg::VIConfig cfg;
  cfg.mode = o.mode == "sh" ? tg::Mode::shared : tg::Mode::independent;
  cfg.backend = o.backend == "smt"      ? tg::Backend::smt
                : o.backend == "hybrid" ? tg::Backend::hybrid
                                        : tg::Backend::opt;
  cfg.stop.tolerance = o.eps;
  cfg.stop.max_iters = o.max_iters;
  cfg.local.restarts = o.restarts;
  cfg.local.seed = o.seed;
  cfg.solver = endpoint_from(o);
  cfg.jobs = o.jobs;
  return cfg;
}

void write_report(const std::string& path, const nlohmann::json& doc) {
  if (path.empty()) return;
  tg::save_text(path, doc.dump(2) + "\n");
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    tg::save_text(out, text);
}

std::vector<std::pair<int, int>> parse_edge_list(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw CLI::ValidationError("--edges", "expected u-v pairs");
    edges.push_back({std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))});
  }
  return edges;
}

tg::Rational require_rational(const std::string& text) {
  auto r = tg::parse_rational(text);
  if (!r) throw std::runtime_error("not a rational: \"" + text + "\"");
  return *r;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"team reachability game toolkit"};
  app.require_subcommand(1);
  CommonOpts o;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a benchmark game");
  std::string family, builtin_name = "door", out_path, edges_text, buffers_text = "1,1";
  int scenario = 1, channels = 2, vertices = 3, clique_k = 3;
  gen->add_option("--family", family, "pursuit|robot|jamming|clique|builtin")
      ->required()
      ->check(CLI::IsMember({"pursuit", "robot", "jamming", "clique", "builtin"}));
  gen->add_option("--scenario", scenario, "pursuit/robot scenario number");
  gen->add_option("--C", channels, "jamming: channel count");
  gen->add_option("--B", buffers_text, "jamming: per-sensor buffer sizes, comma separated");
  gen->add_option("--vertices", vertices, "clique: vertex count");
  gen->add_option("--edges", edges_text, "clique: undirected edges as u-v,u-v,...");
  gen->add_option("--k", clique_k, "clique: clique size sought");
  gen->add_option("--name", builtin_name, "builtin: door|memory|door-merged");
  gen->add_option("-o,--output", out_path, "output path (stdout when omitted)");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check a game document");
  validate_cmd->add_option("input", o.input, "game file")->required();

  // solve-threshold
  auto* st = app.add_subcommand("solve-threshold", "certified lower bounds and verdict");
  st->add_option("input", o.input, "game file")->required();
  std::string t_text = "0";
  st->add_option("--t", t_text, "threshold (rational or decimal)");
  std::string profile_out;
  st->add_option("--profile-out", profile_out, "write the extracted profile here");
  st->add_option("--report", o.report, "machine-readable report path");
  add_vi_flags(st, o);

  // solve-almost-sure
  auto* as = app.add_subcommand("solve-almost-sure", "almost-sure reachability decision");
  as->add_option("input", o.input, "game file")->required();
  std::string encoding = "binary", cert_out;
  as->add_option("--encoding", encoding, "rank encoding")
      ->check(CLI::IsMember({"binary", "unary"}));
  as->add_option("--certificate", cert_out, "write the verified certificate here");
  as->add_option("--report", o.report, "machine-readable report path");

  // export-smt
  auto* es = app.add_subcommand("export-smt", "emit the exact threshold encoding");
  es->add_option("input", o.input, "game file")->required();
  es->add_option("--t", t_text, "threshold");
  es->add_option("-o,--output", out_path, "script path (stdout when omitted)");

  // export-cnf
  auto* ec = app.add_subcommand("export-cnf", "emit the almost-sure CNF in DIMACS");
  ec->add_option("input", o.input, "game file")->required();
  ec->add_option("--encoding", encoding, "rank encoding")
      ->check(CLI::IsMember({"binary", "unary"}));
  ec->add_option("-o,--output", out_path, "DIMACS path (stdout when omitted)");

  // check
  auto* chk = app.add_subcommand("check", "model-check a logic formula");
  chk->add_option("input", o.input, "structure file")->required();
  std::string formula_text;
  chk->add_option("--formula", formula_text, "formula text")->required();
  chk->add_option("--report", o.report, "machine-readable report path");
  add_vi_flags(chk, o);

  // bisect
  auto* bi = app.add_subcommand("bisect", "bracket the exact value via the solver");
  bi->add_option("input", o.input, "game file")->required();
  double precision = 1e-3;
  bi->add_option("--precision", precision, "bracket width")->check(CLI::PositiveNumber);
  bi->add_option("--report", o.report, "machine-readable report path");
  add_solver_flags(bi, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto t0 = std::chrono::steady_clock::now();
  try {
    if (gen->parsed()) {
      tg::Game g;
      if (family == "pursuit")
        g = tg::pursuit_scenario(scenario);
      else if (family == "robot")
        g = tg::robot_scenario(scenario);
      else if (family == "jamming") {
        std::vector<int> buffers;
        std::istringstream in(buffers_text);
        std::string item;
        while (std::getline(in, item, ',')) buffers.push_back(std::stoi(item));
        g = tg::gen_jamming(channels, buffers);
      } else if (family == "clique")
        g = tg::gen_clique(vertices, parse_edge_list(edges_text), clique_k);
      else
        g = tg::builtin(builtin_name);
      emit(out_path, tg::serialize_game(g));
      return kExitYes;
    }

    if (validate_cmd->parsed()) {
      if (!std::filesystem::exists(o.input))
        throw std::runtime_error("no such file: " + o.input);
      try {
        tg::load_game(o.input);
      } catch (const tg::ParseError& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return kExitNo;
      }
      std::cout << "valid\n";
      return kExitYes;
    }

    if (st->parsed()) {
      tg::Game g = tg::load_game(o.input);
      tg::Rational t = require_rational(t_text);
      auto cfg = vi_config(o);
      auto res = tg::decide_threshold_vi(g, t, cfg);
      std::cout << tg::format_valuation(g, res.certified);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", res.certified[static_cast<size_t>(g.initial)]);
      bool yes = res.verdict == tg::ThresholdVerdict::Yes;
      std::cout << "certified " << buf << " > " << tg::rational_to_string(t) << ": "
                << (yes ? "Yes" : "Unknown") << "\n";
      if (!profile_out.empty())
        tg::save_text(profile_out,
                      tg::serialize_profile(tg::solved_form(g, cfg.mode), res.profile));
      nlohmann::json rep;
      rep["verdict"] = yes ? "Yes" : "Unknown";
      rep["mode"] = o.mode;
      rep["backend"] = o.backend;
      rep["iterations"] = res.vi.iterations;
      rep["seconds"] = elapsed_since(t0);
      rep["warnings"] = res.vi.warnings;
      for (size_t s = 0; s < res.certified.size(); ++s)
        rep["certified"][g.states[s]] = res.certified[s];
      write_report(o.report, rep);
      return yes ? kExitYes : kExitUnknown;
    }

    if (as->parsed()) {
      tg::Game g = tg::load_game(o.input);
      auto enc = encoding == "unary" ? tg::RankEncoding::unary : tg::RankEncoding::binary;
      auto res = tg::solve_almost_sure(g, enc);
      std::cout << (res.yes ? "Yes" : "No") << "\n";
      if (res.yes && !cert_out.empty())
        tg::save_text(cert_out, tg::serialize_certificate(g, res.certificate));
      nlohmann::json rep;
      rep["verdict"] = res.yes ? "Yes" : "No";
      rep["encoding"] = encoding;
      rep["seconds"] = elapsed_since(t0);
      write_report(o.report, rep);
      return res.yes ? kExitYes : kExitNo;
    }

    if (es->parsed()) {
      tg::Game g = tg::load_game(o.input);
      emit(out_path, tg::emit_threshold_formula(g, require_rational(t_text)).render());
      return kExitYes;
    }

    if (ec->parsed()) {
      tg::Game g = tg::load_game(o.input);
      auto enc = encoding == "unary" ? tg::RankEncoding::unary : tg::RankEncoding::binary;
      emit(out_path, tg::to_dimacs(tg::encode(g, enc)));
      return kExitYes;
    }

    if (chk->parsed()) {
      tg::Game g = tg::load_game(o.input);
      auto formula = tg::parse_formula(formula_text);
      tg::CheckBackends backends;
      backends.solver = endpoint_from(o);
      backends.stop.tolerance = o.eps;
      backends.stop.max_iters = o.max_iters;
      backends.local.restarts = o.restarts;
      backends.local.seed = o.seed;
      backends.jobs = o.jobs;
      auto res = tg::satisfying_states(g, formula, backends);
      auto v = res.verdict[static_cast<size_t>(g.initial)];
      std::cout << (v == tg::Verdict::True    ? "true"
                    : v == tg::Verdict::False ? "false"
                                              : "unknown")
                << "\n";
      nlohmann::json rep;
      rep["formula"] = formula->to_string();
      rep["verdict"] =
          v == tg::Verdict::True ? "true" : v == tg::Verdict::False ? "false" : "unknown";
      rep["provenance"] = res.provenance;
      rep["seconds"] = elapsed_since(t0);
      for (size_t s = 0; s < res.verdict.size(); ++s)
        rep["states"][g.states[s]] = res.verdict[s] == tg::Verdict::True    ? "true"
                                     : res.verdict[s] == tg::Verdict::False ? "false"
                                                                            : "unknown";
      write_report(o.report, rep);
      return v == tg::Verdict::True ? kExitYes : v == tg::Verdict::False ? kExitNo : kExitUnknown;
    }

    if (bi->parsed()) {
      auto ep = endpoint_from(o);
      if (!ep) {
        std::cerr << "bisect requires a solver endpoint (--solver or TG_SMT_SOLVER)\n";
        return kExitConfig;
      }
      tg::Game g = tg::load_game(o.input);
      auto res = tg::bisect_value(g, precision, *ep);
      char buf[128];
      std::snprintf(buf, sizeof buf, "[%.6f, %.6f]%s\n", res.lo, res.hi,
                    res.partial ? " (partial)" : "");
      std::cout << buf;
      nlohmann::json rep;
      rep["lo"] = res.lo;
      rep["hi"] = res.hi;
      rep["partial"] = res.partial;
      rep["seconds"] = elapsed_since(t0);
      write_report(o.report, rep);
      return kExitYes;
    }
  } catch (const CLI::ValidationError&) {
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}
