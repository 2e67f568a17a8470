#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roughloop/derham.hpp"
#include "roughloop/dyadic_paths.hpp"
#include "roughloop/loop_forms.hpp"
#include "roughloop/wiener_geometry.hpp"

namespace roughloop {

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr const char* kSeedEnv = "ROUGHLOOP_SEED";

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = kDefaultSeed;
  int level = -1;    // -1: the experiment's default
  int n_seeds = -1;  // -1: the experiment's default
  std::string group = "so3";
  BesovParams besov;
  std::map<std::string, std::string> params;
};

// INI text with sections [run], [besov] and [params]. Unknown sections or
// keys in [run]/[besov] are errors; [params] keys are checked by validate().
// A missing seed falls back to $ROUGHLOOP_SEED, then kDefaultSeed.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& c);

struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string doc;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  int default_level = 0;
  int default_n_seeds = 0;
  std::vector<ParamSpec> params;
};
const std::vector<ExperimentInfo>& list_experiments();
const ExperimentInfo* find_experiment(const std::string& name);
ExperimentConfig default_config(const std::string& experiment);

std::vector<std::string> validate(const ExperimentConfig& c);

struct ResultRow {
  std::string experiment;
  std::string group;
  int level = 0;
  std::string param;  // "key=value;..." for the parameter point
  std::string statistic;
  double value = 0.0;
  double std_error = 0.0;  // NaN when not applicable
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

struct RunResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> breaches;  // acceptance thresholds missed
};

// Throws Error(ErrorCode::config) listing validation errors.
RunResult run_experiment(const ExperimentConfig& c, int workers = 1);

inline constexpr const char* kCsvHeader = "experiment,group,level,param,statistic,value,stderr,n,seed,wall_time_ms";
std::string to_csv(const std::vector<ResultRow>& rows, bool include_timing = true);
std::string csv_field(const std::string& s);

// Inputs shared by the experiments and the acceptance suite.
struct IbpInputs {
  LoopFunctional f, g;
  SampledPath h;
};
IbpInputs standard_ibp_inputs(const LieGroup& G, int level);

struct ConvexDomain {
  std::string name;
  int dim = 0;
  std::function<bool(const Eigen::VectorXd&)> contains;
};
std::vector<ConvexDomain> standard_convex_domains();
std::vector<TestFunction> standard_battery(int dim);

std::vector<PathFunctional> standard_qi_functionals(const LieGroup& G);
GroupMat standard_shift(const LieGroup& G);

struct FlowInputs {
  GroupMat a;
  std::function<GroupMat(double)> phi;
  SampledPath h;
};
FlowInputs standard_flow_inputs(const LieGroup& G, int level);

// alpha and h with independent N(0,1) coefficients on the sine modes k <= modes.
std::pair<LoopOneForm, SampledPath> random_form_pair(const LieGroup& G, int level, int modes, SeededStream stream);

}  // namespace roughloop
