#include "roughloop/c_api.h"

#include <bit>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "roughloop/error.hpp"
#include "roughloop/experiments.hpp"
#include "roughloop/lie_core.hpp"

using namespace roughloop;

struct rl_config {
  ExperimentConfig cfg;
  std::vector<std::string> errors;
};

struct rl_result {
  RunResult run;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

rl_status set_error(rl_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
rl_status guarded(F&& body) {
  try {
    body();
    return RL_OK;
  } catch (const Error& e) {
    return set_error(static_cast<rl_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RL_ERR_INTERNAL, "unknown exception");
  }
}

rl_status null_arg(const char* who) { return set_error(RL_ERR_INVALID_ARGUMENT, std::string(who) + ": null argument"); }

}  // namespace

extern "C" {

const char* rl_version(void) { return "0.1.0"; }

const char* rl_last_error(void) { return g_last_error.c_str(); }

const char* rl_status_name(rl_status s) {
  switch (s) {
    case RL_OK: return "ok";
    case RL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RL_ERR_LEVEL_MISMATCH: return "level_mismatch";
    case RL_ERR_OUT_OF_RANGE: return "out_of_range";
    case RL_ERR_CUT_LOCUS: return "cut_locus";
    case RL_ERR_NOT_CLOSED: return "not_closed";
    case RL_ERR_OUTSIDE_DOMAIN: return "outside_domain";
    case RL_ERR_CONFIG: return "config";
    case RL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

rl_status rl_config_parse(const char* text, rl_config** out) {
  if (!text || !out) return null_arg("rl_config_parse");
  *out = nullptr;
  return guarded([&] { *out = new rl_config{parse_config(text), {}}; });
}

rl_status rl_config_load(const char* path, rl_config** out) {
  if (!path || !out) return null_arg("rl_config_load");
  *out = nullptr;
  return guarded([&] { *out = new rl_config{load_config(path), {}}; });
}

rl_status rl_config_default(const char* experiment, rl_config** out) {
  if (!experiment || !out) return null_arg("rl_config_default");
  *out = nullptr;
  return guarded([&] { *out = new rl_config{default_config(experiment), {}}; });
}

rl_status rl_config_set(rl_config* cfg, const char* section, const char* key, const char* value) {
  if (!cfg || !section || !key || !value) return null_arg("rl_config_set");
  return guarded([&] {
    // Round-trip through the INI parser so both entry points share one set of rules.
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(format_config(cfg->cfg));
    pt::read_ini(in, tree);
    tree.put(pt::ptree::path_type(std::string(section) + "/" + key, '/'), std::string(value));
    std::ostringstream o;
    pt::write_ini(o, tree);
    cfg->cfg = parse_config(o.str());
  });
}

uint64_t rl_config_seed(const rl_config* cfg) { return cfg ? cfg->cfg.seed : 0; }

rl_status rl_config_validate(rl_config* cfg) {
  if (!cfg) return null_arg("rl_config_validate");
  rl_status st = guarded([&] { cfg->errors = validate(cfg->cfg); });
  if (st != RL_OK) return st;
  if (cfg->errors.empty()) return RL_OK;
  return set_error(RL_ERR_CONFIG, cfg->errors.front());
}

size_t rl_config_error_count(const rl_config* cfg) { return cfg ? cfg->errors.size() : 0; }

const char* rl_config_error(const rl_config* cfg, size_t i) {
  if (!cfg || i >= cfg->errors.size()) return nullptr;
  return cfg->errors[i].c_str();
}

void rl_config_free(rl_config* cfg) { delete cfg; }

size_t rl_experiment_count(void) { return list_experiments().size(); }

const char* rl_experiment_name(size_t i) {
  const auto& v = list_experiments();
  return i < v.size() ? v[i].name.c_str() : nullptr;
}

const char* rl_experiment_description(size_t i) {
  const auto& v = list_experiments();
  return i < v.size() ? v[i].description.c_str() : nullptr;
}

rl_status rl_run(const rl_config* cfg, int workers, rl_result** out) {
  if (!cfg || !out) return null_arg("rl_run");
  *out = nullptr;
  return guarded([&] { *out = new rl_result{run_experiment(cfg->cfg, workers), {}}; });
}

const char* rl_result_csv(rl_result* res, int include_timing) {
  if (!res) return nullptr;
  res->csv = to_csv(res->run.rows, include_timing != 0);
  return res->csv.c_str();
}

size_t rl_result_row_count(const rl_result* res) { return res ? res->run.rows.size() : 0; }

size_t rl_result_breach_count(const rl_result* res) { return res ? res->run.breaches.size() : 0; }

const char* rl_result_breach(const rl_result* res, size_t i) {
  if (!res || i >= res->run.breaches.size()) return nullptr;
  return res->run.breaches[i].c_str();
}

void rl_result_free(rl_result* res) { delete res; }

rl_status rl_so3_exp(const double v[3], double out[9]) {
  if (!v || !out) return null_arg("rl_so3_exp");
  return guarded([&] {
    const GroupMat g = exp_alg(AlgVec(v[0], v[1], v[2]));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = g(i, j);
  });
}

rl_status rl_so3_log(const double g[9], double out[3]) {
  if (!g || !out) return null_arg("rl_so3_log");
  return guarded([&] {
    GroupMat m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = g[3 * i + j];
    const AlgVec v = log_grp(m);
    for (int i = 0; i < 3; ++i) out[i] = v(i);
  });
}

rl_status rl_path_besov_norm(const double* values, size_t n_values, int m, double theta, double* out) {
  if (!values || !out) return null_arg("rl_path_besov_norm");
  return guarded([&] {
    const std::size_t cells = n_values - 1;
    if (n_values < 2 || !std::has_single_bit(cells))
      fail(ErrorCode::level_mismatch, "rl_path_besov_norm: need 2^level + 1 values");
    const int level = std::countr_zero(cells);
    const SampledPath x = SampledPath::from_values(1, level, std::vector<double>(values, values + n_values));
    *out = path_besov_norm(x, m, theta);
  });
}

}  // extern "C"
