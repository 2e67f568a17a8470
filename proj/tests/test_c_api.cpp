#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "roughloop/c_api.h"

TEST_CASE("version and status names") {
  CHECK(std::strlen(rl_version()) > 0);
  CHECK(std::string(rl_status_name(RL_OK)) == "ok");
  CHECK(std::string(rl_status_name(RL_ERR_CUT_LOCUS)) == "cut_locus");
  CHECK(std::string(rl_status_name(static_cast<rl_status>(42))) == "unknown");
}

TEST_CASE("config handles") {
  rl_config* cfg = nullptr;
  CHECK(rl_config_parse(nullptr, &cfg) == RL_ERR_INVALID_ARGUMENT);
  CHECK(rl_config_parse("[run]\ncolour = red\n", &cfg) == RL_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(rl_last_error()).find("colour") != std::string::npos);
  CHECK(rl_config_load("/nonexistent/file.ini", &cfg) != RL_OK);

  REQUIRE(rl_config_parse("[run]\nexperiment = flow-identities\nseed = 11\nlevel = 6\nn_seeds = 2\n", &cfg) == RL_OK);
  CHECK(rl_config_seed(cfg) == 11);
  CHECK(rl_config_validate(cfg) == RL_OK);
  CHECK(rl_config_error_count(cfg) == 0);

  CHECK(rl_config_set(cfg, "params", "bogus", "1") == RL_OK);
  CHECK(rl_config_validate(cfg) == RL_ERR_CONFIG);
  CHECK(rl_config_error_count(cfg) >= 1);
  CHECK(rl_config_error(cfg, 0) != nullptr);
  CHECK(rl_config_error(cfg, 1000) == nullptr);
  CHECK(rl_config_set(cfg, "run", "nonsense", "1") == RL_ERR_CONFIG);
  rl_config_free(cfg);

  REQUIRE(rl_config_default("small-ball", &cfg) == RL_OK);
  CHECK(rl_config_set(cfg, "run", "seed", "77") == RL_OK);
  CHECK(rl_config_seed(cfg) == 77);
  CHECK(rl_config_validate(cfg) == RL_OK);
  rl_config_free(cfg);
  CHECK(rl_config_default("nope", &cfg) != RL_OK);
  rl_config_free(nullptr);
}

TEST_CASE("registry through the C API") {
  REQUIRE(rl_experiment_count() == 10);
  for (size_t i = 0; i < rl_experiment_count(); ++i) {
    CHECK(rl_experiment_name(i) != nullptr);
    CHECK(std::strlen(rl_experiment_description(i)) > 0);
  }
  CHECK(rl_experiment_name(10) == nullptr);
}

TEST_CASE("runs and CSV") {
  rl_config* cfg = nullptr;
  REQUIRE(rl_config_parse("[run]\nexperiment = flow-identities\ngroup = abelian-stub\nseed = 4\nlevel = 6\nn_seeds = 2\n",
                          &cfg) == RL_OK);
  rl_result* a = nullptr;
  rl_result* b = nullptr;
  REQUIRE(rl_run(cfg, 1, &a) == RL_OK);
  REQUIRE(rl_run(cfg, 3, &b) == RL_OK);
  CHECK(rl_result_row_count(a) > 0);
  CHECK(rl_result_breach_count(a) == 0);
  CHECK(rl_result_breach(a, 0) == nullptr);
  const std::string csv_a = rl_result_csv(a, 0);
  const std::string csv_b = rl_result_csv(b, 0);
  CHECK(csv_a == csv_b);
  CHECK(csv_a.rfind("experiment,group,level,param,statistic,value,stderr,n,seed,wall_time_ms\n", 0) == 0);
  rl_result_free(a);
  rl_result_free(b);

  CHECK(rl_config_set(cfg, "run", "n_seeds", "0") == RL_OK);
  rl_result* c = nullptr;
  CHECK(rl_run(cfg, 1, &c) == RL_ERR_CONFIG);
  CHECK(c == nullptr);
  rl_config_free(cfg);
  CHECK(rl_run(nullptr, 1, &c) == RL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("SO(3) helpers") {
  const double v[3] = {0.0, 0.0, M_PI / 2};
  double g[9];
  REQUIRE(rl_so3_exp(v, g) == RL_OK);
  const double want[9] = {0, -1, 0, 1, 0, 0, 0, 0, 1};
  for (int i = 0; i < 9; ++i) CHECK(g[i] == doctest::Approx(want[i]).scale(1.0));
  double back[3];
  REQUIRE(rl_so3_log(g, back) == RL_OK);
  CHECK(back[2] == doctest::Approx(M_PI / 2));

  const double flip[9] = {1, 0, 0, 0, -1, 0, 0, 0, -1};
  CHECK(rl_so3_log(flip, back) == RL_ERR_CUT_LOCUS);
  CHECK(rl_so3_exp(nullptr, g) == RL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("Besov norm helper") {
  std::vector<double> xs(65);
  for (size_t k = 0; k < xs.size(); ++k) xs[k] = static_cast<double>(k) / 64.0;
  double out = 0.0;
  REQUIRE(rl_path_besov_norm(xs.data(), xs.size(), 18, 0.7, &out) == RL_OK);
  CHECK(out > 0.0);
  CHECK(std::isfinite(out));
  std::vector<double> twice(xs);
  for (double& x : twice) x *= 2.0;
  double out2 = 0.0;
  REQUIRE(rl_path_besov_norm(twice.data(), twice.size(), 18, 0.7, &out2) == RL_OK);
  CHECK(out2 == doctest::Approx(2.0 * out).epsilon(1e-12));
  CHECK(rl_path_besov_norm(xs.data(), 64, 18, 0.7, &out) == RL_ERR_LEVEL_MISMATCH);
  CHECK(rl_path_besov_norm(xs.data(), xs.size(), 17, 0.7, &out) == RL_ERR_INVALID_ARGUMENT);
}
