// roughloop: run registered experiments and write CSV.
//
//   roughloop list
//   roughloop validate --config run.ini
//   roughloop run --config run.ini --out result.csv [--assert] [--workers N] [--omit-timing]
//
// Exit codes: 0 success, 1 runtime error, 2 invalid config, 3 threshold breach under --assert.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "roughloop/c_api.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBreach = 3;

struct ConfigHandle {
  rl_config* p = nullptr;
  ~ConfigHandle() { rl_config_free(p); }
};

struct ResultHandle {
  rl_result* p = nullptr;
  ~ResultHandle() { rl_result_free(p); }
};

// Loads and validates; prints diagnostics and returns an exit code on failure.
int load_valid(const std::string& path, ConfigHandle& cfg) {
  rl_status st = rl_config_load(path.c_str(), &cfg.p);
  if (st != RL_OK) {
    std::cerr << "error: " << rl_last_error() << "\n";
    return st == RL_ERR_CONFIG ? kExitInvalid : kExitError;
  }
  st = rl_config_validate(cfg.p);
  if (st == RL_OK) return 0;
  if (st != RL_ERR_CONFIG) {
    std::cerr << "error: " << rl_last_error() << "\n";
    return kExitError;
  }
  for (size_t i = 0; i < rl_config_error_count(cfg.p); ++i) std::cerr << "invalid: " << rl_config_error(cfg.p, i) << "\n";
  return kExitInvalid;
}

int cmd_list() {
  for (size_t i = 0; i < rl_experiment_count(); ++i)
    std::cout << rl_experiment_name(i) << "\t" << rl_experiment_description(i) << "\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  ConfigHandle cfg;
  const int rc = load_valid(path, cfg);
  if (rc == 0) std::cout << "ok\n";
  return rc;
}

int cmd_run(const std::string& path, const std::string& out, int workers, bool check, bool omit_timing) {
  ConfigHandle cfg;
  if (const int rc = load_valid(path, cfg)) return rc;
  ResultHandle res;
  if (rl_run(cfg.p, workers, &res.p) != RL_OK) {
    std::cerr << "error: " << rl_last_error() << "\n";
    return kExitError;
  }
  const char* csv = rl_result_csv(res.p, omit_timing ? 0 : 1);
  if (out == "-") {
    std::cout << csv;
  } else {
    std::ofstream f(out, std::ios::binary);
    f << csv;
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return kExitError;
    }
  }
  const size_t breaches = rl_result_breach_count(res.p);
  for (size_t i = 0; i < breaches; ++i) std::cerr << (check ? "breach: " : "note: ") << rl_result_breach(res.p, i) << "\n";
  return check && breaches > 0 ? kExitBreach : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic rough-path and loop-group experiments"};
  app.set_version_flag("--version", std::string(rl_version()));
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List registered experiments");

  std::string vconfig;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("--config", vconfig, "INI config")->required()->check(CLI::ExistingFile);

  std::string config, out;
  int workers = 1;
  bool check = false, omit_timing = false;
  auto* run = app.add_subcommand("run", "Run one experiment and write CSV");
  run->add_option("--config", config, "INI config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "CSV output path, - for stdout")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 1024));
  run->add_flag("--assert", check, "Exit 3 when an acceptance threshold is missed");
  run->add_flag("--omit-timing", omit_timing, "Leave wall_time_ms empty");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }
  if (*list) return cmd_list();
  if (*validate) return cmd_validate(vconfig);
  return cmd_run(config, out, workers, check, omit_timing);
}
