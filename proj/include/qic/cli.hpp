#pragma once

// Command-line front end: bounds, simulate, fuzz and fig2 subcommands.
//
// Exit codes: 0 success, 1 property violation, 2 usage, 3 unsupported
// parameter, 4 I/O. Probabilities are printed fixed with 10 decimals.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qic/bounds.hpp"
#include "qic/games.hpp"
#include "qic/propcheck.hpp"

#ifndef QIC_VERSION
#define QIC_VERSION "0.0.0"
#endif

namespace qic::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kUnsupported = 3, kIo = 4 };

/// A failure with a specific exit code.
struct CliError : std::runtime_error {
  CliError(int c, const std::string& what) : std::runtime_error(what), code(c) {}
  int code;
};

inline std::string fixed10(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(10) << v;
  return os.str();
}

/// The printed value, as a JSON number.
inline nlohmann::json json_prob(double v) { return std::stod(fixed10(v)); }

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Command, flags, seed, toolkit version and timestamps of one run.
struct RunManifest {
  std::string command;
  nlohmann::json flags = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string version = QIC_VERSION;
  std::string started = utc_now();
  std::string finished;

  nlohmann::json to_json() const {
    return {{"command", command}, {"flags", flags},   {"seed", seed},
            {"version", version}, {"started", started}, {"finished", finished}};
  }
};

/// Parsed --strategy value.
inline games::Strategy parse_strategy(const std::string& name, std::size_t n, std::size_t m) {
  if (name == "naive") return games::naive_strategy(n, m);
  if (name == "teleport") return games::teleportation_strategy(games::paired_earac(n));
  const std::string prefix = "channel:";
  if (name.rfind(prefix, 0) == 0) {
    std::vector<double> lambdas;
    std::stringstream ss(name.substr(prefix.size()));
    for (std::string item; std::getline(ss, item, ',');) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) throw CliError(kUsage, "bad channel parameter '" + item + "'");
      lambdas.push_back(v);
    }
    if (lambdas.size() != n) throw CliError(kUsage, "channel strategy needs exactly n parameters");
    try {
      return games::channel_strategy(lambdas);
    } catch (const std::out_of_range& e) {
      throw CliError(kUsage, e.what());
    }
  }
  throw CliError(kUsage, "unknown strategy '" + name + "'");
}

struct BoundsArgs {
  std::size_t m = 0;
  std::vector<std::size_t> n_list;
};

inline int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  if (a.n_list.empty()) throw CliError(kUsage, "--n-list is empty");
  for (auto n : a.n_list)
    if (n < 1 || a.m > n) throw CliError(kUsage, "need 1 <= n and m <= n for every n");
  out << "n,m,p_naive,p_teleport,p_prime,q_prime\n";
  for (auto n : a.n_list) {
    const auto r = bounds::evaluate(a.m, n);
    out << n << ',' << a.m << ',' << fixed10(r.p_naive) << ',' << fixed10(r.p_teleport) << ','
        << fixed10(r.p_prime) << ',' << fixed10(r.q_prime) << '\n';
  }
  return kOk;
}

struct SimulateArgs {
  std::string strategy = "naive";
  std::size_t n = 4;
  std::size_t m = 1;
  std::string mode = "exact";
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
  int version = 1;
  unsigned workers = 0;
};

inline nlohmann::json simulate_json(const SimulateArgs& a, RunManifest& manifest) {
  games::GameConfig cfg;
  cfg.n = a.n;
  cfg.m = a.m;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.version = a.version == 2 ? games::GameVersion::II : games::GameVersion::I;
  cfg.mode = a.mode == "exact" ? games::EvalMode::exact : games::EvalMode::monte_carlo;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kUsage, e.what());
  }
  games::GameResult r;
  try {
    r = games::run_qic(parse_strategy(a.strategy, a.n, a.m), cfg);
  } catch (const games::UnsupportedParameter& e) {
    throw CliError(kUnsupported, e.what());
  }
  manifest.finished = utc_now();
  return {{"p_hat", json_prob(r.p_hat)},
          {"std_err", json_prob(r.std_err)},
          {"trials", r.trials},
          {"mode", games::to_string(r.mode)},
          {"reference_run", r.reference_run},
          {"manifest", manifest.to_json()}};
}

struct FuzzArgs {
  std::string suite;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t max_dim = 2;
  unsigned workers = 0;
  bool corrupt_entropy = false;
};

inline int cmd_fuzz(const FuzzArgs& a, RunManifest& manifest, std::ostream& out) {
  propcheck::FuzzConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.max_subsystem_dim = a.max_dim;
  cfg.workers = a.workers;
  if (a.corrupt_entropy) cfg.entropy = [](const DensityOperator& r) { return -von_neumann_entropy(r); };
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kUsage, e.what());
  }
  const auto s = propcheck::run_named_suite(a.suite, cfg);
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : s.violations)
    v.push_back({{"suite", x.suite}, {"trial", x.trial}, {"label", x.label}, {"left", x.left}, {"right", x.right},
                 {"seed", x.seed}});
  manifest.finished = utc_now();
  const nlohmann::json j{{"suite", s.suite},           {"trials", s.trials},     {"checks", s.checks},
                         {"max_excess", s.max_excess}, {"tolerance", cfg.tolerance},
                         {"violations", v},            {"manifest", manifest.to_json()}};
  out << j.dump(2) << '\n';
  return s.violations.empty() ? kOk : kViolation;
}

inline std::string fig2_csv(std::size_t n_max) {
  std::ostringstream os;
  os << "n,p_naive,p_teleport,p_prime\n";
  for (std::size_t n = 2; n <= n_max; ++n)
    os << n << ',' << fixed10(bounds::naive_p(1, n)) << ',' << fixed10(bounds::teleport_p(n)) << ','
       << fixed10(bounds::solve_p_prime(1, n)) << '\n';
  return os.str();
}

inline int cmd_fig2(std::size_t n_max, const std::string& path, RunManifest& manifest, std::ostream& out) {
  if (n_max < 2) throw CliError(kUsage, "--n-max must be at least 2");
  const auto csv = fig2_csv(n_max);
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << csv) || !f.flush()) throw CliError(kIo, "cannot write " + path);
  }
  manifest.finished = utc_now();
  std::ofstream side(path + ".manifest.json", std::ios::trunc);
  if (!(side << manifest.to_json().dump(2) << '\n')) throw CliError(kIo, "cannot write " + path + ".manifest.json");
  out << path << '\n';
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Quantum information causality toolkit", "qic"};
  app.require_subcommand(1);
  app.set_version_flag("--version-info", QIC_VERSION);

  BoundsArgs ba;
  auto* bounds_cmd = app.add_subcommand("bounds", "P_N, P_T, P' and Q' as CSV");
  bounds_cmd->add_option("--m", ba.m, "message qubits")->required();
  bounds_cmd->add_option("--n-list", ba.n_list, "comma-separated n values")->delimiter(',')->required();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "evaluate a strategy in the QIC game");
  sim->add_option("--strategy", sa.strategy, "naive | teleport | channel:<l0,l1,...>");
  sim->add_option("--n", sa.n)->check(CLI::PositiveNumber);
  sim->add_option("--m", sa.m);
  sim->add_option("--mode", sa.mode)->check(CLI::IsMember({"exact", "mc"}));
  sim->add_option("--trials", sa.trials)->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed);
  sim->add_option("--version", sa.version)->check(CLI::IsMember({1, 2}));
  sim->add_option("--workers", sa.workers, "threads, 0 = all cores");

  FuzzArgs fa;
  auto* fuzz = app.add_subcommand("fuzz", "property checks of the entropic inequalities");
  fuzz->add_option("--suite", fa.suite)->required()->check(
      CLI::IsMember({"qicchain", "classical", "sumbound", "achievability"}));
  fuzz->add_option("--trials", fa.trials)->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", fa.seed);
  fuzz->add_option("--max-dim", fa.max_dim)->check(CLI::Range(2, 4));
  fuzz->add_option("--workers", fa.workers, "threads, 0 = all cores");
  fuzz->add_flag("--corrupt-entropy", fa.corrupt_entropy)->group("");  // harness self-test

  std::size_t n_max = 0;
  std::string out_path;
  auto* fig2 = app.add_subcommand("fig2", "m = 1 curves P_N, P_T and P' as CSV");
  fig2->add_option("--n-max", n_max)->required();
  fig2->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  RunManifest manifest;
  for (const auto* opt : app.get_subcommands().front()->get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto res = opt->results();
    manifest.flags[opt->get_name()] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
  }
  manifest.command = app.get_subcommands().front()->get_name();

  try {
    if (*bounds_cmd) return cmd_bounds(ba, out);
    if (*sim) {
      manifest.seed = sa.seed;
      out << simulate_json(sa, manifest).dump(2) << '\n';
      return kOk;
    }
    if (*fuzz) {
      manifest.seed = fa.seed;
      return cmd_fuzz(fa, manifest, out);
    }
    return cmd_fig2(n_max, out_path, manifest, out);
  } catch (const CliError& e) {
    err << "qic: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "qic: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace qic::cli
