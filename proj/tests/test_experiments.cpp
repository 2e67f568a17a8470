#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "roughloop/error.hpp"
#include "roughloop/experiments.hpp"

using namespace roughloop;

namespace {

struct ScopedEnv {
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (value)
      setenv(name, value, 1);
    else
      unsetenv(name);
  }
  ~ScopedEnv() { unsetenv(name_); }
  const char* name_;
};

ExperimentConfig small_flow(const std::string& group) {
  return parse_config("[run]\nexperiment = flow-identities\ngroup = " + group +
                      "\nseed = 5\nlevel = 6\nn_seeds = 3\n");
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "[run]\nexperiment = small-ball\nseed = 42\nlevel = 7\nn_seeds = 10\ngroup = so3\n"
      "[besov]\nm = 20\ntheta = 0.68\ntheta_prime = 0.72\n[params]\nepsilon = 1.2\n");
  CHECK(c.experiment == "small-ball");
  CHECK(c.seed == 42);
  CHECK(c.level == 7);
  CHECK(c.n_seeds == 10);
  CHECK(c.besov.m == 20);
  CHECK(c.besov.theta == 0.68);
  CHECK(c.params.at("epsilon") == "1.2");
  CHECK(validate(c).empty());

  const ExperimentConfig back = parse_config(format_config(c));
  CHECK(format_config(back) == format_config(c));

  CHECK_THROWS_AS(parse_config("[run]\nexperiment = small-ball\ncolour = red\n"), Error);
  CHECK_THROWS_AS(parse_config("[extra]\nx = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[run]\nseed = -3\n"), Error);
  CHECK_THROWS_AS(parse_config("[besov]\nm = many\n"), Error);

  ExperimentConfig bad = c;
  bad.params["no_such_key"] = "1";
  CHECK_FALSE(validate(bad).empty());
  bad = c;
  bad.besov.m = 19;
  CHECK_FALSE(validate(bad).empty());
  bad = c;
  bad.besov.theta_prime = 0.68;
  CHECK_FALSE(validate(bad).empty());
  bad = c;
  bad.experiment = "nope";
  CHECK_FALSE(validate(bad).empty());
  bad = c;
  bad.group = "su2";
  CHECK_FALSE(validate(bad).empty());
  CHECK_THROWS_AS(run_experiment(bad), Error);
}

TEST_CASE("seed fallback") {
  {
    ScopedEnv env(kSeedEnv, "977");
    CHECK(parse_config("[run]\nexperiment = small-ball\n").seed == 977);
    CHECK(parse_config("[run]\nexperiment = small-ball\nseed = 3\n").seed == 3);
  }
  {
    ScopedEnv env(kSeedEnv, nullptr);
    CHECK(parse_config("[run]\nexperiment = small-ball\n").seed == kDefaultSeed);
  }
}

TEST_CASE("registry") {
  const auto& xs = list_experiments();
  CHECK(xs.size() == 10);
  std::set<std::string> names;
  for (const auto& e : xs) {
    names.insert(e.name);
    CHECK_FALSE(e.description.empty());
    CHECK(find_experiment(e.name)->name == e.name);
    const ExperimentConfig d = default_config(e.name);
    CHECK(d.experiment == e.name);
    CHECK(validate(d).empty());
  }
  CHECK(names.size() == xs.size());
  CHECK(names.count("ibp-mc") == 1);
  CHECK(find_experiment("missing") == nullptr);
}

TEST_CASE("csv formatting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  ResultRow r{"x", "so3", 4, "k=1;n=2", "mean", 0.1, std::numeric_limits<double>::quiet_NaN(), 7, 9, 1.5};
  const std::string with = to_csv({r}, true);
  CHECK(with == std::string(kCsvHeader) + "\nx,so3,4,k=1;n=2,mean,0.10000000000000001,,7,9,1.500\n");
  CHECK(to_csv({r}, false) == std::string(kCsvHeader) + "\nx,so3,4,k=1;n=2,mean,0.10000000000000001,,7,9,\n");
}

TEST_CASE("runs are reproducible across worker counts") {
  const ExperimentConfig c = small_flow("so3");
  const RunResult a = run_experiment(c, 1);
  const RunResult b = run_experiment(c, 1);
  const RunResult p = run_experiment(c, 4);
  REQUIRE_FALSE(a.rows.empty());
  CHECK(to_csv(a.rows, false) == to_csv(b.rows, false));
  CHECK(to_csv(a.rows, false) == to_csv(p.rows, false));
  for (const ResultRow& r : a.rows) {
    CHECK(r.seed == 5);
    CHECK(r.param.find("n_seeds=3") != std::string::npos);
  }
}

TEST_CASE("abelian flow identities pass") {
  const RunResult r = run_experiment(small_flow("abelian-stub"), 2);
  CHECK(r.breaches.empty());
  for (const ResultRow& row : r.rows) CHECK(row.group == "abelian-stub");
}

TEST_CASE("shared inputs") {
  CHECK(standard_convex_domains().size() == 5);
  for (const ConvexDomain& d : standard_convex_domains()) CHECK(d.contains(Eigen::VectorXd::Zero(d.dim)));
  CHECK(standard_battery(3).size() == 10);
  CHECK(standard_shift(LieGroup::so3()).determinant() == doctest::Approx(1.0));
  const FlowInputs fi = standard_flow_inputs(LieGroup::torus(), 6);
  CHECK(fi.h.dim() == 1);
}
