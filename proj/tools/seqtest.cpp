// seqtest: command-line front end. Exit codes: 0 success, 2 invalid input,
// 3 numerical failure, 4 resource budget exceeded.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "seqtest/cli/commands.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitResource = 4;

struct FlagHelp {
  const char* key;
  const char* help;
};

constexpr FlagHelp kFlags[] = {
    {"pair", "qubit pair r0,r1,theta (theta may be written as a multiple of pi, e.g. pi/4)"},
    {"mode", "error condition: strong, weak-asymmetric or symmetric"},
    {"eps0", "strong error bound when accepting H0 (symmetric mode: the mean error)"},
    {"eps1", "strong error bound when accepting H1 (defaults to eps0)"},
    {"alpha", "type I error (weak-asymmetric mode)"},
    {"beta", "type II error (weak-asymmetric mode)"},
    {"prior", "prior probability eta0 of H0"},
    {"phi", "measurement angle in [0, pi]"},
    {"phi-grid", "number of measurement angles in a phi sweep"},
    {"ell-range", "block lengths lo:hi[:step]"},
    {"n-max", "largest copy number"},
    {"trials", "Monte-Carlo trials per hypothesis"},
    {"seed", "64-bit generator seed"},
    {"max-steps", "step cap per simulated trial"},
    {"hypothesis", "hypothesis (0 or 1) of the continue-probability bound"},
    {"method", "sdp-curve solver: sdp or lp (commuting pairs only)"},
    {"r-grid", "purity grid lo:hi:count"},
    {"theta-grid", "angle grid lo:hi:count"},
    {"theta-list", "comma-separated angles"},
    {"s-grid", "overlap grid lo:hi:count"},
    {"s", "overlap of the pure states"},
    {"eps-sweep", "comma-separated error levels for simulate"},
    {"sweep", "local: phi or grid; pure: s or c0"},
    {"out", "output file (side tables go to <out>.<name>.<format>)"},
    {"format", "csv or json"},
    {"log-base", "units of divergences: e (nats) or 2 (bits)"},
};

constexpr const char* kCommands[][2] = {
    {"divergence", "relative entropies, sandwiched Renyi grid, Chernoff exponent, kappa_n"},
    {"local", "local SPRT mean copies against the Chernoff copy count"},
    {"simulate", "Monte-Carlo local SPRT: stopping times, errors, trajectories"},
    {"blocks", "block-length sweep of the measured rates"},
    {"sdp-curve", "lower bound on the continue probability per copy number"},
    {"region", "attainability of the worst-case bound over a purity grid"},
    {"pure", "unambiguous protocol for pure states"},
    {"bounds", "lower and upper bounds on the mean number of copies"},
};

std::string side_path(const std::string& out, const std::string& name, const std::string& format) {
  return out + "." + name + "." + format;
}

void write_table(const seqtest::cli::Table& t, const std::string& path, const std::string& format) {
  if (path.empty()) {
    t.write(std::cout, format);
    return;
  }
  std::ofstream os(path);
  if (!os) throw seqtest::ValidationError("cannot open output file '" + path + "'");
  t.write(os, format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential quantum hypothesis testing: bounds, strategies and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(seqtest::cli::kVersion));

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::string> config_path;
  for (const auto& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd[0], cmd[1]);
    subs[cmd[0]] = sub;
    sub->add_option("--config", config_path[cmd[0]], "JSON config file; flags override its fields");
    for (const auto& f : kFlags) sub->add_option(std::string("--") + f.key, values[std::string(cmd[0]) + "/" + f.key], f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      seqtest::cli::ExperimentConfig cfg;
      if (!config_path[name].empty()) seqtest::cli::apply_config_file(cfg, config_path[name], name);
      for (const auto& f : kFlags) {
        if (sub->count(std::string("--") + f.key) > 0) cfg.set(f.key, values[name + "/" + f.key]);
      }
      const seqtest::cli::CommandOutput out = seqtest::cli::run_command(name, cfg);
      write_table(out.main, cfg.out, cfg.format);
      if (!cfg.out.empty()) {
        for (const auto& [suffix, table] : out.side) write_table(table, side_path(cfg.out, suffix, cfg.format), cfg.format);
      }
      for (const auto& w : out.main.warnings()) std::cerr << "warning: " << w << "\n";
    }
  } catch (const seqtest::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const seqtest::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const seqtest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
