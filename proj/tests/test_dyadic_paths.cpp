#include <doctest.h>

#include <cmath>

#include "roughloop/dyadic_paths.hpp"
#include "roughloop/error.hpp"
#include "roughloop/gauss_sampler.hpp"

using namespace roughloop;

namespace {

// Piecewise-linear interpolation through the points k 2^-N.
double interp_oracle(const SampledPath& w, int comp, int N, std::size_t k) {
  const std::size_t stride = std::size_t{1} << (w.level() - N);
  const std::size_t a = (k / stride) * stride;
  if (a == k) return w.at(k, comp);
  const double lam = static_cast<double>(k - a) / static_cast<double>(stride);
  return (1 - lam) * w.at(a, comp) + lam * w.at(a + stride, comp);
}

double linear_path_norm(int m, double theta) {
  const double q = m * (1.0 - theta);
  return std::pow(1.0 / ((q - 1.0) * q), 1.0 / m);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(BesovParams::standard(18, 0.70, 0.75).validate());
  CHECK_THROWS_AS(BesovParams::standard(17, 0.70, 0.75).validate(), Error);
  CHECK_THROWS_AS(BesovParams::standard(18, 0.75, 0.70).validate(), Error);
  CHECK_THROWS_AS(BesovParams::standard(12, 0.70, 0.75).validate(), Error);  // m(1-theta') = 3
  CHECK_NOTHROW(BesovParams::relaxed_params(12, 0.70, 0.75).validate());
  CHECK_THROWS_AS(BesovParams::relaxed_params(6, 0.70, 0.75).validate(), Error);
}

TEST_CASE("paths start at the origin and have 2^M+1 samples") {
  const SampledPath w = sample_brownian(2, 5, SeededStream{1, 0});
  CHECK(w.size() == 33);
  CHECK(w.at(0, 0) == 0.0);
  CHECK(w.at(0, 1) == 0.0);
  CHECK_THROWS_AS(SampledPath::from_values(1, 2, {1.0, 0, 0, 0, 0}), Error);
  CHECK_THROWS_AS(SampledPath::from_values(1, 2, {0, 0, 0}), Error);
}

TEST_CASE("dyadic approximation") {
  const SampledPath lin = SampledPath::linear(6, {0.5, -2.0});
  for (int N = 0; N <= 6; ++N) CHECK(dyadic_approx(lin, N).raw() == lin.raw());

  const SampledPath saw = SampledPath::from_values(1, 2, {0, 1, 0, 1, 0});
  const SampledPath flat = dyadic_approx(saw, 1);
  for (double v : flat.raw()) CHECK(v == 0.0);

  const SampledPath w = sample_brownian(3, 8, SeededStream{4, 2});
  const SampledPath w3 = dyadic_approx(w, 3);
  for (int i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(w3.at(k, i) == doctest::Approx(interp_oracle(w, i, 3, k)).epsilon(1e-14));

  CHECK(cm_norm(dyadic_complement(w, 8)) == 0.0);
  const SampledPath sum = dyadic_complement(w, 3) + w3;
  for (std::size_t k = 0; k < w.raw().size(); ++k) CHECK(sum.raw()[k] == doctest::Approx(w.raw()[k]).epsilon(1e-15));
  const SampledPath c2 = dyadic_complement(w, 2);
  for (std::size_t k = 0; k < w.size(); k += 64)
    for (int i = 0; i < 3; ++i) CHECK(c2.at(k, i) == 0.0);
}

TEST_CASE("Cameron-Martin norm") {
  CHECK(cm_norm(SampledPath::linear(5, {1.0, 2.0, 2.0})) == doctest::Approx(3.0));
  CHECK(cm_norm(SampledPath(2, 5)) == 0.0);
  const SampledPath tent = SampledPath::from_function(1, 6, [](double t, double* x) { x[0] = std::min(t, 1.0 - t); });
  CHECK(cm_norm(tent) == doctest::Approx(1.0));
  const SampledPath a = sample_brownian(2, 6, SeededStream{2, 1}), b = sample_brownian(2, 6, SeededStream{2, 2});
  CHECK(cm_inner(a, a) == doctest::Approx(cm_norm(a) * cm_norm(a)));
  CHECK(cm_inner(a, b) == doctest::Approx(cm_inner(b, a)));
}

TEST_CASE("Besov norm of the linear increment") {
  const int m = 18;
  const double theta = 0.70;
  const SimplexGrid phi = SimplexGrid::increments(SampledPath::linear(10, {1.0}));
  const double closed = linear_path_norm(m, theta / 2.0);
  CHECK(besov_norm(phi, m, theta / 2.0) == doctest::Approx(closed).epsilon(0.01));
  CHECK(path_besov_norm(SampledPath::linear(10, {1.0}), m, theta / 2.0) == doctest::Approx(closed).epsilon(0.01));
  CHECK(besov_norm(SimplexGrid::zero(6), m, theta) == 0.0);
  CHECK(path_besov_norm(SampledPath(1, 6), m, theta) == 0.0);
  const SampledPath w = sample_brownian(1, 8, SeededStream{3, 3});
  CHECK(path_besov_norm(2.5 * w, m, theta) == doctest::Approx(2.5 * path_besov_norm(w, m, theta)).epsilon(1e-12));
}

TEST_CASE("Besov quadrature against an independent brute-force sum") {
  // Square cells use the corner average at lag (k-j)h; the diagonal half-cell
  // uses the centroid, where a linear interpolant takes a third of the increment.
  const int m = 6;
  const double th = 0.35;
  const SampledPath x = sample_brownian(2, 5, SeededStream{10, 0});
  const std::size_t n = x.cells();
  const double h = 1.0 / n, expo = 2.0 + m * th;
  auto phi = [&](std::size_t j, std::size_t k, int c) { return x.at(k, c) - x.at(j, c); };
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double q = 0.0;
    for (int c = 0; c < 2; ++c) q += std::pow(phi(j, j + 1, c) / 3.0, 2);
    acc += 0.5 * h * h * std::pow(q, m / 2.0) / std::pow(h / 3.0, expo);
    for (std::size_t k = j + 1; k < n; ++k) {
      double v = 0.0;
      for (int c = 0; c < 2; ++c) {
        const double avg = 0.25 * (phi(j, k, c) + phi(j, k + 1, c) + phi(j + 1, k, c) + phi(j + 1, k + 1, c));
        v += avg * avg;
      }
      acc += h * h * std::pow(v, m / 2.0) / std::pow((k - j) * h, expo);
    }
  }
  CHECK(besov_norm(SimplexGrid::increments(x), m, th) == doctest::Approx(std::pow(acc, 1.0 / m)).epsilon(1e-12));
}

TEST_CASE("Hoelder norm") {
  CHECK(hoelder_norm(SimplexGrid::increments(SampledPath::linear(8, {1.0})), 0.35) == doctest::Approx(1.0));
  CHECK(hoelder_norm(SimplexGrid::zero(6), 0.35) == 0.0);
  const SampledPath w = sample_brownian(1, 6, SeededStream{5, 0});
  double brute = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s)
    for (std::size_t t = s + 1; t < w.size(); ++t)
      brute = std::max(brute, std::abs(w.at(t, 0) - w.at(s, 0)) / std::pow(w.time(t) - w.time(s), 0.35));
  CHECK(hoelder_norm(SimplexGrid::increments(w), 0.35) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("Cameron-Martin paths are controlled by their H-norm") {
  RandomSource rng(SeededStream{6, 0});
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal();
    const SampledPath phi = SampledPath::from_function(1, 9, [&](double t, double* x) {
      x[0] = a * std::sin(M_PI * t) + b * t * t + c * std::sin(3 * M_PI * t) / 3;
    });
    CHECK(path_besov_norm(phi, 18, 0.35) <= cm_norm(phi));
  }
}

TEST_CASE("pair product grids") {
  const SampledPath t = SampledPath::linear(5, {1.0});
  const SimplexGrid g = pair_product_grid(t, 0, t, 0);
  for (std::size_t j = 0; j < t.size(); j += 3)
    for (std::size_t k = j; k < t.size(); k += 5) CHECK(g.value(0, j, k) == doctest::Approx(std::pow(t.time(k) - t.time(j), 2)));
  CHECK(besov_norm(pair_product_grid(SampledPath(1, 5), 0, t, 0), 18, 0.7) == 0.0);
  const SampledPath x = sample_brownian(2, 5, SeededStream{7, 0}), y = sample_brownian(2, 5, SeededStream{7, 1});
  const SimplexGrid p = pair_product_grid(x, 1, y, 0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = j; k < x.size(); ++k)
      CHECK(p.value(0, j, k) == doctest::Approx((x.at(k, 1) - x.at(j, 1)) * (y.at(k, 0) - y.at(j, 0))).epsilon(1e-13));
}

TEST_CASE("dense and lazy grids agree") {
  const SampledPath x = sample_brownian(1, 6, SeededStream{8, 0}), y = sample_brownian(1, 6, SeededStream{8, 1});
  const SimplexGrid lazy = SimplexGrid::area(x.component(0), y.component(0), 6);
  const SimplexGrid dense = lazy.materialize();
  CHECK(dense.is_dense());
  CHECK(besov_norm(lazy, 18, 0.7) == doctest::Approx(besov_norm(dense, 18, 0.7)).epsilon(1e-12));
  CHECK(besov_norm(lazy - dense, 18, 0.7) < 1e-13);
}

TEST_CASE("embedding constants are finite and positive") {
  std::vector<SampledPath> batch;
  for (int s = 0; s < 4; ++s) batch.push_back(sample_brownian(1, 6, SeededStream{9, static_cast<std::uint64_t>(s)}));
  const EmbeddingConstants c = estimate_embedding_constants(batch, BesovParams::standard(18, 0.7, 0.75));
  CHECK(c.samples == 12);  // ordered pairs
  CHECK(c.M > 0.0);
  CHECK(c.N > 0.0);
  CHECK(c.R() >= c.N);
}
