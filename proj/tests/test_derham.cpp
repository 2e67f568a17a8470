#include <doctest.h>

#include <cmath>

#include "roughloop/derham.hpp"
#include "roughloop/error.hpp"
#include "roughloop/gauss_sampler.hpp"
#include "roughloop/loop_forms.hpp"

using namespace roughloop;
using V = Eigen::VectorXd;

namespace {

V vec(std::initializer_list<double> xs) {
  V v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

FiniteForm1 exact_form(const Polynomial& P, int n) {
  return {n, P.dim - n, [P](const V& z) { return P.gradient(z); }, {}};
}

std::vector<V> probe_grid(int dim, int count, RandomSource& rng) {
  std::vector<V> out;
  for (int i = 0; i < count; ++i) {
    V z(dim);
    for (int j = 0; j < dim; ++j) z(j) = 2.0 * rng.uniform() - 1.0;
    out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("Gauss-Legendre exactness") {
  const QuadratureRule& q = gauss_legendre(5);
  double s9 = 0.0, s1 = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    s9 += q.weights[k] * std::pow(q.nodes[k], 9);
    s1 += q.weights[k];
  }
  CHECK(s9 == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("homotopy operator by hand") {
  // alpha = y dx + x dy
  const FiniteForm1 a{1, 1, [](const V& z) { return vec({z(1), z(0)}); }, {}};
  CHECK(homotopy_K(a, vec({0.3, -0.7})) == doctest::Approx(0.3 * -0.7).epsilon(1e-14));
  const FiniteForm1 x_only{1, 1, [](const V& z) { return vec({z(1), 0.0}); }, {}};
  CHECK(homotopy_K(x_only, vec({0.4, 0.9})) == 0.0);
  // alpha = 2xy dx + x^2 dy -> x^2 y
  const FiniteForm1 b{1, 1, [](const V& z) { return vec({2 * z(0) * z(1), z(0) * z(0)}); }, {}};
  CHECK(homotopy_K(b, vec({0.6, 0.5})) == doctest::Approx(0.36 * 0.5).epsilon(1e-14));
  const FiniteForm1 boxed{1, 1, [](const V& z) { return vec({z(1), z(0)}); },
                          [](const V& z) { return z.cwiseAbs().maxCoeff() < 1.0; }};
  CHECK_THROWS_AS(homotopy_K(boxed, vec({2.0, 0.0})), Error);
}

TEST_CASE("primitives of exact polynomial forms") {
  RandomSource rng(SeededStream{70, 0});
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(6));
    const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(dim)));
    const Polynomial P = random_polynomial(dim, 4, 6, rng);
    const auto grid = probe_grid(dim, 10, rng);
    const V base = V::Zero(dim);
    const auto g = primitive_of_closed(exact_form(P, n), base, grid);
    for (const V& z : grid) {
      CHECK((fd_gradient(g, z) - P.gradient(z)).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(g(z) == doctest::Approx(P(z) - P(base)).epsilon(1e-12));
    }
  }
}

TEST_CASE("primitive degenerate cases") {
  RandomSource rng(SeededStream{70, 1});
  const auto grid = probe_grid(3, 5, rng);
  const FiniteForm1 zero{1, 2, [](const V&) { return V(V::Zero(3)); }, {}};
  const auto g0 = primitive_of_closed(zero, V::Zero(3), grid);
  for (const V& z : grid) CHECK(g0(z) == 0.0);

  // n = 0: one application of K
  const Polynomial P{2, {{1.0, {2, 1}}, {-0.5, {0, 3}}}};
  const FiniteForm1 pure{0, 2, [P](const V& z) { return P.gradient(z); }, {}};
  const auto g = primitive_of_closed(pure, V::Zero(2), probe_grid(2, 5, rng));
  const V z = vec({0.3, -0.8});
  CHECK(g(z) == doctest::Approx(homotopy_K(pure, z)).epsilon(1e-14));

  const FiniteForm1 curl{1, 1, [](const V& z) { return vec({-z(1), z(0)}); }, {}};
  CHECK(closedness_defect(curl, {vec({0.1, 0.2})}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(primitive_of_closed(curl, V::Zero(2), {vec({0.1, 0.2})}), Error);
}

TEST_CASE("polynomial derivatives") {
  const Polynomial P{2, {{2.0, {2, 1}}, {-1.0, {0, 3}}, {0.5, {1, 0}}}};
  const V z = vec({0.7, -0.4});
  CHECK(P(z) == doctest::Approx(2 * 0.49 * -0.4 + 0.064 + 0.35));
  CHECK((P.gradient(z) - vec({4 * 0.7 * -0.4 + 0.5, 2 * 0.49 - 3 * 0.16})).norm() < 1e-14);
  Eigen::MatrixXd H(2, 2);
  H << 4 * -0.4, 4 * 0.7, 4 * 0.7, -6 * -0.4;
  CHECK((P.hessian(z) - H).norm() < 1e-14);
  CHECK(P.degree() == 3);
}

TEST_CASE("Poincare certificate arithmetic") {
  const PoincareCertificate c = combine_poincare(1, 1, 1, 1);
  CHECK(c.factor_x == 3.0);
  CHECK(c.factor_y == 3.0);
  CHECK(combine_poincare(1, 1, 0.5, 0.8).factor_x > combine_poincare(1, 1, 0.6, 0.8).factor_x);
  CHECK(combine_poincare(1, 1, 0.5, 0.8).factor_y > combine_poincare(1, 1, 0.6, 0.8).factor_y);
  const ToyPoincareReport toy = toy_product_poincare(20000, 20, SeededStream{71, 0});
  CHECK(toy.rows.size() == 20);
  CHECK(toy.all_passed());
}

TEST_CASE("Gaussian Poincare on convex sets") {
  std::vector<TestFunction> fs{{"x1", [](const V& x) { return x(0); }, [](const V& x) { return V(V::Unit(x.size(), 0)); }},
                               {"const", [](const V&) { return 2.0; }, [](const V& x) { return V(V::Zero(x.size())); }}};
  const PoincareReport slab =
      gaussian_convex_poincare_mc(2, [](const V& x) { return std::abs(x(0)) < 0.5; }, fs, 20000, SeededStream{72, 0});
  CHECK(slab.rows[0].ratio + 1.96 * slab.rows[0].std_error < 1.0);
  CHECK(slab.rows[1].ratio == 0.0);
  CHECK(slab.rows[1].variance == doctest::Approx(0.0));
  const PoincareReport full = gaussian_convex_poincare_mc(3, {}, fs, 20000, SeededStream{72, 1});
  CHECK(std::abs(full.rows[0].ratio - 1.0) < 3.0 * full.rows[0].std_error + 1e-12);
  CHECK(full.all_passed());
}

TEST_CASE("line Stokes") {
  const SampledPath w = sample_brownian(1, 7, SeededStream{73, 0});
  const SampledPath h = SampledPath::from_function(1, 7, [](double t, double* x) { x[0] = std::sin(2 * t) + t; });
  // f(w) = (int_0^1 w dt)^2 with H-gradient 2 (int w) g, g(t) = t - t^2/2
  const SampledPath g = SampledPath::from_function(1, 7, [](double t, double* x) { x[0] = t - 0.5 * t * t; });
  auto integral = [](const SampledPath& p) { return cm_inner(p, SampledPath::from_function(1, p.level(), [](double t, double* x) { x[0] = t - 0.5 * t * t; })); };
  auto f = [&](const SampledPath& p) { return std::pow(integral(p), 2); };
  auto Df = [&](const SampledPath& p) { return 2.0 * integral(p) * g; };
  const HCurve line{[h](double t) { return t * h; }, [h](double) { return h; }};
  const StokesSides s = stokes_line(f, Df, w, line);
  const double A = integral(w), B = integral(h);
  CHECK(s.lhs == doctest::Approx(2 * A * B + B * B).epsilon(1e-12));
  CHECK(s.rhs == doctest::Approx(2 * A * B + B * B).epsilon(1e-12));

  const StokesSides c = stokes_line([](const SampledPath&) { return 3.0; }, [](const SampledPath& p) { return SampledPath(p.dim(), p.level()); }, w, line);
  CHECK(c.lhs == 0.0);
  CHECK(c.rhs == 0.0);

  const HCurve loop{[h](double t) { return std::sin(2 * M_PI * t) * h; }, [h](double t) { return 2 * M_PI * std::cos(2 * M_PI * t) * h; }};
  CHECK(std::abs(stokes_line(f, Df, w, loop).rhs) < 1e-8);
}

TEST_CASE("surface Stokes") {
  const LieGroup T = LieGroup::torus();
  const H0Frame frame(T, 2, 7);
  const SampledPath w = sample_brownian(1, 7, SeededStream{74, 0});
  const SampledPath e1 = frame[0], e2 = frame[1];
  const HSurface H{[=](double s, double t) { return t * e1 + (s * t * (1 - t)) * e2; },
                   [=](double, double t) { return (t * (1 - t)) * e2; },
                   [=](double s, double t) { return e1 + (s * (1 - 2 * t)) * e2; }};
  // beta = -l2 dl1 + l1 dl2: d beta = 2 dl1 ^ dl2, so the boundary difference is -2 * (area 1/6)
  const FrameOneForm rot{frame.basis(), [](const V& l) { return vec({-l(1), l(0)}); }, [](const V&) {
                           Eigen::MatrixXd J(2, 2);
                           J << 0, 1, -1, 0;
                           return J;
                         }};
  const StokesSides green = stokes_surface(rot, w, H);
  CHECK(green.lhs == doctest::Approx(-1.0 / 3.0).epsilon(1e-6));
  CHECK(green.rhs == doctest::Approx(-1.0 / 3.0).epsilon(1e-6));

  const Polynomial P{2, {{1.0, {2, 1}}, {0.5, {0, 3}}, {-1.0, {1, 1}}}};
  const FrameOneForm exact{frame.basis(), [P](const V& l) { return P.gradient(l); }, [P](const V& l) { return P.hessian(l); }};
  const StokesSides ex = stokes_surface(exact, w, H);
  CHECK(std::abs(ex.lhs) < 1e-8);
  CHECK(std::abs(ex.rhs) < 1e-8);

  const HSurface flat{[=](double, double t) { return t * e1; }, [=](double, double) { return SampledPath(1, 7); },
                      [=](double, double) { return e1; }};
  const StokesSides fl = stokes_surface(rot, w, flat);
  CHECK(std::abs(fl.lhs) < 1e-14);
  CHECK(std::abs(fl.rhs) < 1e-14);
}
