#include <doctest.h>

#include <cmath>

#include "roughloop/gauss_sampler.hpp"

using namespace roughloop;

TEST_CASE("Brownian sampler is deterministic per stream") {
  const SampledPath a = sample_brownian(3, 7, SeededStream{30, 5});
  const SampledPath b = sample_brownian(3, 7, SeededStream{30, 5});
  CHECK(a.raw() == b.raw());
  CHECK(a.raw() != sample_brownian(3, 7, SeededStream{30, 6}).raw());
}

TEST_CASE("Brownian sampler moments") {
  const int n = 100000;
  double sum[2] = {0, 0};
  std::vector<double> incr;
  incr.reserve(n);
  for (int s = 0; s < n; ++s) {
    const SampledPath w = sample_brownian(2, 3, SeededStream{31, static_cast<std::uint64_t>(s)});
    sum[0] += w.at(8, 0);
    sum[1] += w.at(8, 1);
    // |w(3/4) - w(1/4)|^2 has mean d (t - s) = 1
    incr.push_back(std::pow(w.at(6, 0) - w.at(2, 0), 2) + std::pow(w.at(6, 1) - w.at(2, 1), 2));
  }
  for (double s : sum) CHECK(std::abs(s / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  const EstimateCI e = mean_estimate(incr);
  CHECK(std::abs(e.mean - 1.0) < 3.0 * e.std_error);
}

TEST_CASE("increment layers telescope") {
  const SampledPath w = sample_brownian(2, 7, SeededStream{32, 0});
  SampledPath sum = dyadic_approx(w, 0);
  for (int N = 1; N <= 7; ++N) sum = sum + increment_layer(w, N);
  for (std::size_t k = 0; k < w.raw().size(); ++k) CHECK(sum.raw()[k] == doctest::Approx(w.raw()[k]).epsilon(1e-14));
  CHECK(cm_norm(increment_layer(SampledPath::linear(7, {1.0, 2.0}), 3)) == 0.0);
}

TEST_CASE("increment layer variance obeys the min(|t-s|, 2^-N) bound") {
  const int N = 3, M = 7, n = 4000;
  RandomSource pick(SeededStream{33, 0});
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (int i = 0; i < 10; ++i) {
    std::size_t s = pick.below(129), t = pick.below(129);
    if (s == t) t = (s + 1) % 129;
    pairs.emplace_back(std::min(s, t), std::max(s, t));
  }
  std::vector<std::vector<double>> sq(pairs.size());
  for (int s = 0; s < n; ++s) {
    const SampledPath z = increment_layer(sample_brownian(1, M, SeededStream{33, 1 + static_cast<std::uint64_t>(s)}), N);
    for (std::size_t i = 0; i < pairs.size(); ++i) sq[i].push_back(std::pow(z.at(pairs[i].second, 0) - z.at(pairs[i].first, 0), 2));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double dt = static_cast<double>(pairs[i].second - pairs[i].first) / 128.0;
    const EstimateCI e = mean_estimate(sq[i]);
    // for d = 1 the sharp constant is 1; 2 leaves room for the sampling noise
    CHECK(e.mean <= 2.0 * std::min(dt, std::pow(2.0, -N)) + 3.0 * e.std_error);
  }
}

TEST_CASE("one-step area decomposition matches direct computation") {
  const SampledPath w = sample_brownian(2, 8, SeededStream{34, 0});
  for (int N = 2; N <= 6; ++N) {
    const SimplexGrid a = area_step_decomposed(w, N, 0, 1), b = area_step_direct(w, N, 0, 1);
    for (std::size_t s = 0; s < w.size(); s += 13)
      for (std::size_t t = s; t < w.size(); t += 17) CHECK(std::abs(a.value(0, s, t) - b.value(0, s, t)) < 1e-10);
  }
}

TEST_CASE("convergence table is reproducible") {
  const BesovParams p = BesovParams::relaxed_params(12, 0.70, 0.75);
  const ConvergenceTable a = convergence_experiment(1, 6, 2, 4, p, 1, SeededStream{35, 0}, 1, 20);
  const ConvergenceTable b = convergence_experiment(1, 6, 2, 4, p, 1, SeededStream{35, 0}, 2, 20);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (int k = 0; k < kConvergenceStats; ++k) CHECK(a.rows[r].median[k] == b.rows[r].median[k]);
}

TEST_CASE("small-ball estimates") {
  const SmallBallResult all = small_ball_estimate({}, 3, 100, SeededStream{36, 0}, 6);
  CHECK(all.estimate.mean == 1.0);

  const BesovParams p = BesovParams::standard(18, 0.70, 0.75);
  std::vector<SmallBallConstraint> loose{
      {"path", 10.0, [p](const SampledPath& w) { return path_besov_norm(w, p.m, p.theta_prime / 2.0); }}};
  const SmallBallResult big = small_ball_estimate(loose, 2, 10000, SeededStream{36, 1}, 6);
  CHECK(big.estimate.lo > 0.99);

  const auto cons = positivity_constraints({SampledPath::linear(7, {1.0})}, 1.5, p);
  CHECK(cons.size() == 3);
  const SmallBallResult r3 = small_ball_estimate(cons, 3, 400, SeededStream{36, 2}, 7);
  CHECK(r3.estimate.lo > 0.0);
}
