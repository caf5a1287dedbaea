// Copyright (c) 2026 the hyperlim authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command line driver: exit codes (0 success,
// 1 failure, 2 bad configuration), output files of `run` and `convergence`,
// and the `check` suite runner. Each test shells out to the built binary.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include "hyperlim/config.hpp"

namespace fs = std::filesystem;

namespace
{

int run_cli(const std::string &args, const std::string &log = "cli_log.txt")
{
  std::string cmd = std::string("\"") + HYPERLIM_CLI_PATH + "\" " + args + " > " + log + " 2>&1";
  int raw = std::system(cmd.c_str());
#ifndef _WIN32
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
#else
  return raw;
#endif
}

std::string slurp(const std::string &path)
{
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string &path, const std::string &text)
{
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("run subcommand writes outputs and exits 0", "[cli]")
{
  std::string conf = std::string(HYPERLIM_CONFIG_DIR) + "/advection_smoke.conf";
  REQUIRE(fs::exists(conf));
  fs::remove_all("out_advection_smoke");

  CHECK(run_cli("run " + conf) == 0);
  CHECK(fs::exists("out_advection_smoke/snapshot_000000.csv"));
  CHECK(fs::exists("out_advection_smoke/snapshot_final.csv"));
  CHECK(fs::exists("out_advection_smoke/diagnostics.csv"));
  CHECK(fs::exists("out_advection_smoke/summary.txt"));

  std::string summary = slurp("out_advection_smoke/summary.txt");
  CHECK(summary.find("preset: sine_advection") != std::string::npos);
  CHECK(summary.find("l1_error_window: ") != std::string::npos);

  std::string log = slurp("cli_log.txt");
  CHECK(log.find("rel mass drift") != std::string::npos);
}

TEST_CASE("shipped configs parse cleanly", "[cli]")
{
  std::size_t seen = 0;
  for (const auto &entry : fs::directory_iterator(HYPERLIM_CONFIG_DIR))
  {
    if (entry.path().extension() != ".conf")
    {
      continue;
    }
    seen++;
    INFO(entry.path().string());
    CHECK_NOTHROW(hyperlim::Config::parse_file(entry.path().string()));
  }
  CHECK(seen >= 4);  // the corpus shipped with the repository
}

TEST_CASE("convergence subcommand writes the rate table", "[cli]")
{
  write_file("conv_test.conf", "preset = sine_advection\n"
                               "mesh.n = 16\n"
                               "time.t_final = 0.05\n"
                               "output.dir = out_conv_test\n");
  fs::remove_all("out_conv_test");
  CHECK(run_cli("convergence conv_test.conf --levels 2") == 0);
  REQUIRE(fs::exists("out_conv_test/convergence.csv"));
  std::string table = slurp("out_conv_test/convergence.csv");
  CHECK(table.find("n,l1,l1_rate,linf,linf_rate") == 0);
}

TEST_CASE("configuration problems exit with code 2", "[cli]")
{
  // Unknown key in an otherwise valid config.
  write_file("bad_key.conf", "preset = sine_advection\nmesh.n = 16\n"
                             "time.t_final = 0.01\nmisspelled.key = 1\n");
  CHECK(run_cli("run bad_key.conf") == 2);
  CHECK(slurp("cli_log.txt").find("misspelled.key") != std::string::npos);

  // Unknown preset name.
  write_file("bad_preset.conf", "preset = vortex\n");
  CHECK(run_cli("run bad_preset.conf") == 2);

  // Config file that does not exist (rejected by the argument parser).
  CHECK(run_cli("run no_such_file.conf") == 2);

  // Unknown argument and missing subcommand.
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("") == 2);
}

TEST_CASE("check subcommand reports suite results", "[cli]")
{
  CHECK(run_cli("check --suite graph --seed 7") == 0);
  std::string log = slurp("cli_log.txt");
  CHECK(log.find("suite graph") != std::string::npos);
  CHECK(log.find("PASS") != std::string::npos);

  CHECK(run_cli("check --suite no_such_suite") != 0);
}
