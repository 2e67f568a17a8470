#include <doctest.h>

#include <cmath>

#include "roughloop/gauss_sampler.hpp"
#include "roughloop/rough_lift.hpp"

using namespace roughloop;

namespace {

// int_s^t (x_u - x_s) dy_u on a refinement of both interpolants; the
// trapezoid sum is exact on every fine cell, so refinement only adds nodes.
double riemann_oracle(const SampledPath& x, const SampledPath& y, std::size_t s, std::size_t t, int fine) {
  const SampledPath xf = x.upsample(fine), yf = y.upsample(fine);
  const std::size_t r = std::size_t{1} << (fine - x.level());
  const double xs = xf.at(s * r, 0);
  double acc = 0.0;
  for (std::size_t u = s * r; u < t * r; ++u)
    acc += (0.5 * (xf.at(u, 0) + xf.at(u + 1, 0)) - xs) * (yf.at(u + 1, 0) - yf.at(u, 0));
  return acc;
}

}  // namespace

TEST_CASE("iterated integrals of linear and constant paths") {
  const SampledPath x = SampledPath::linear(6, {2.0}), y = SampledPath::linear(6, {-0.5});
  const SimplexGrid C = iterated_integral(x, y);
  for (std::size_t s = 0; s < x.size(); s += 5)
    for (std::size_t t = s; t < x.size(); t += 7)
      CHECK(C.value(0, s, t) == doctest::Approx(-1.0 * std::pow(x.time(t) - x.time(s), 2) / 2.0).epsilon(1e-14));
  const SimplexGrid Z = iterated_integral(x, SampledPath(1, 6));
  CHECK(besov_norm(Z, 18, 0.7) == 0.0);
}

TEST_CASE("iterated integral against a fine Riemann sum") {
  const SampledPath x = sample_brownian(1, 6, SeededStream{20, 0}), y = sample_brownian(1, 6, SeededStream{20, 1});
  const SimplexGrid C = iterated_integral(x, y);
  RandomSource rng(SeededStream{20, 2});
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t s = rng.below(65), t = rng.below(65);
    if (s > t) std::swap(s, t);
    CHECK(C.value(0, s, t) == doctest::Approx(riemann_oracle(x, y, s, t, 14)).epsilon(1e-9));
  }
}

TEST_CASE("lift of a polynomial path") {
  // w1 = t, w2 = t^2: C(w1, w2)_{s,t} = int_s^t (u - s) 2u du
  const SampledPath w = SampledPath::from_function(2, 7, [](double t, double* x) {
    x[0] = t;
    x[1] = t * t;
  });
  const Level2Lift L = lift(w);
  const SimplexGrid C12 = L.area_component(0, 1);
  for (std::size_t s = 0; s < w.size(); s += 9)
    for (std::size_t t = s; t < w.size(); t += 11) {
      const double a = w.time(s), b = w.time(t);
      const double exact = 2.0 * (b * b * b - a * a * a) / 3.0 - a * (b * b - a * a);
      // the interpolant of t^2 differs from t^2 by O(h^2)
      CHECK(C12.value(0, s, t) == doctest::Approx(exact).epsilon(1e-4));
    }
  const Level2Lift Z = lift(SampledPath(3, 5));
  CHECK(besov_norm(Z.area, 18, 0.7) == 0.0);
}

TEST_CASE("Chen and integration by parts on a Brownian lift") {
  const Level2Lift L = lift(sample_brownian(3, 8, SeededStream{21, 0}));
  CHECK(ibp_defect(L) < 1e-12);
  RandomSource rng(SeededStream{21, 1});
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t a[3] = {rng.below(257), rng.below(257), rng.below(257)};
    std::sort(a, a + 3);
    CHECK(chen_defect(L, a[0], a[1], a[2]).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(chen_defect(L, 10, 10, 40).cwiseAbs().maxCoeff() == 0.0);
  const Level2Lift lin = lift(SampledPath::linear(6, {1.0, -2.0}));
  CHECK(chen_defect(lin, 3, 17, 60).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rough path distance") {
  const BesovParams p = BesovParams::standard(18, 0.70, 0.75);
  const Level2Lift a = lift(sample_brownian(2, 6, SeededStream{22, 0}));
  const Level2Lift b = lift(sample_brownian(2, 6, SeededStream{22, 1}));
  CHECK(omega_distance(a, a, p) == 0.0);
  CHECK(omega_distance(a, b, p) == doctest::Approx(omega_distance(b, a, p)).epsilon(1e-13));
  const Level2Lift zero = lift(SampledPath(2, 6));
  double expect = 0.0;
  for (int i = 0; i < 2; ++i) {
    expect = std::max(expect, path_besov_norm(a.path.component_path(i), p.m, p.theta_prime / 2.0));
    for (int j = 0; j < 2; ++j) expect = std::max(expect, hoelder_norm(a.area_component(i, j), p.theta));
  }
  CHECK(omega_distance(a, zero, p) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("stochastic integrals B(x, w)") {
  const SampledPath w = sample_brownian(1, 6, SeededStream{23, 0});
  const SampledPath x = SampledPath::from_function(1, 6, [](double t, double* v) { v[0] = std::sin(3 * t); });
  CHECK(besov_norm(wiener_integral_B(SampledPath(1, 6), w), 18, 0.7) == 0.0);
  const SimplexGrid sum = wiener_integral_B(x, w) + wiener_integral_B(w, x);
  for (std::size_t s = 0; s < w.size(); s += 3)
    for (std::size_t t = s; t < w.size(); t += 5)
      CHECK(sum.value(0, s, t) ==
            doctest::Approx((x.at(t, 0) - x.at(s, 0)) * (w.at(t, 0) - w.at(s, 0))).epsilon(1e-12));
}
