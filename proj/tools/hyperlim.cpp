// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0

// Command line driver: `run` advances a preset problem and writes CSV
// outputs, `convergence` runs a mesh refinement study, and `check` replays
// the randomized property suites. Exit codes: 0 success, 1 violated
// invariant or failed suite, 2 configuration error.

#include <cstdio>
#include <exception>
#include <string>
#include <CLI11.hpp>
#include <hyperlim/config.hpp>
#include <hyperlim/run.hpp>
#include <hyperlim/suites.hpp>

namespace
{

int do_check(const std::string &suite, std::uint64_t seed)
{
  std::vector<hyperlim::checks::SuiteResult> results;
  if (suite == "all")
  {
    results = hyperlim::checks::run_all_suites(seed);
  }
  else
  {
    results.push_back(hyperlim::checks::run_suite(suite, seed));
  }
  bool all_pass = true;
  for (const auto &r : results)
  {
    std::printf("suite %-16s %s  (%ld trials) %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.trials, r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"graph-viscosity solver for hyperbolic systems with convex limiting"};
  app.require_subcommand(1);

  std::string run_config, conv_config;
  int levels = 4;
  std::string suite = "all";
  std::uint64_t seed = 42;

  CLI::App *run = app.add_subcommand("run", "advance a preset problem and write outputs");
  run->add_option("config", run_config, "configuration file")->required()->check(CLI::ExistingFile);

  CLI::App *conv = app.add_subcommand("convergence", "mesh refinement study against the exact solution");
  conv->add_option("config", conv_config, "configuration file")->required()->check(CLI::ExistingFile);
  conv->add_option("--levels", levels, "number of refinement levels")->capture_default_str();

  CLI::App *check = app.add_subcommand("check", "run randomized property suites");
  std::string suite_help = "suite name (all";
  for (const auto &name : hyperlim::checks::suite_names())
  {
    suite_help += "|" + name;
  }
  suite_help += ")";
  check->add_option("--suite", suite, suite_help)->capture_default_str();
  check->add_option("--seed", seed, "base seed for the random generators")->capture_default_str();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try
  {
    if (run->parsed())
    {
      return hyperlim::dispatch_run(hyperlim::Config::parse_file(run_config));
    }
    if (conv->parsed())
    {
      return hyperlim::dispatch_convergence(hyperlim::Config::parse_file(conv_config), levels);
    }
    return do_check(suite, seed);
  }
  catch (const hyperlim::ConfigError &e)
  {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
