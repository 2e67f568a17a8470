#include <doctest.h>

#include <cmath>

#include "roughloop/experiments.hpp"
#include "roughloop/gauss_sampler.hpp"
#include "roughloop/group_flows.hpp"

using namespace roughloop;

namespace {

GroupMat rot3(double angle) { return exp_alg(AlgVec(0, 0, angle)); }

}  // namespace

TEST_CASE("flow with a constant driver") {
  const LieGroup G = LieGroup::so3();
  const AlgVec v(0.7, -0.3, 1.1);
  const GroupMat a = exp_alg(AlgVec(0.2, 0.1, -0.4));
  const GroupPath X = solve_flow(G, a, SampledPath::linear(6, {v(0), v(1), v(2)}));
  for (std::size_t k = 0; k < X.size(); k += 8) CHECK((X[k] - a * exp_alg((k / 64.0) * v)).norm() < 1e-12);
  CHECK((X.values.back() - a * exp_alg(v)).norm() < 1e-12);
  const GroupPath Z = solve_flow(G, a, SampledPath(3, 6));
  for (const auto& g : Z.values) CHECK((g - a).norm() == 0.0);
}

TEST_CASE("flows of dyadic approximations converge") {
  const LieGroup G = LieGroup::so3();
  const SampledPath w = sample_brownian(3, 11, SeededStream{50, 0});
  const GroupPath ref = solve_flow(G, GroupMat::Identity(), w);
  std::vector<double> x, y;
  for (int N = 6; N <= 10; ++N) {
    const GroupPath X = solve_flow(G, GroupMat::Identity(), w.restrict_to(N));
    double sup = 0.0;
    const std::size_t stride = std::size_t{1} << (11 - N);
    for (std::size_t k = 0; k < X.size(); ++k) sup = std::max(sup, group_distance(X[k], ref[k * stride]).value);
    x.push_back(N);
    y.push_back(std::log2(sup));
  }
  CHECK(ols_slope(x, y) < 0.0);
}

TEST_CASE("left translation") {
  const LieGroup G = LieGroup::so3();
  const SampledPath w = sample_brownian(3, 8, SeededStream{51, 0});
  CHECK(left_translation_defect(G, exp_alg(AlgVec(0.3, 0.2, -1.0)), w, 17) < 1e-12);
}

TEST_CASE("zeta and Z degenerate cases") {
  const LieGroup G = LieGroup::so3();
  const SampledPath w = sample_brownian(3, 6, SeededStream{52, 0});
  const GroupPath e = GroupPath::from_function(8, [](double) { return GroupMat::Identity(); });
  CHECK(cm_norm(zeta(G, e, w)) == 0.0);
  const GroupPath Z = flow_shift_Z(G, SampledPath(3, 6), w, 6);
  for (const auto& g : Z.values) CHECK((g - GroupMat::Identity()).norm() < 1e-15);
}

TEST_CASE("abelian closed forms") {
  const LieGroup T = LieGroup::torus();
  const SampledPath w = sample_brownian(1, 7, SeededStream{53, 0});
  // zeta is the angle path of phi
  const GroupPath phi = GroupPath::from_function(7, [](double t) { return rot3(0.7 * t + 0.4 * std::sin(M_PI * t)); });
  const SampledPath z = zeta(T, phi, w);
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(z.at(k, 0) == doctest::Approx(0.7 * z.time(k) + 0.4 * std::sin(M_PI * z.time(k))).epsilon(1e-12));
  // Z(t) is the rotation by h(t)
  const SampledPath h = SampledPath::from_function(1, 7, [](double t, double* x) { x[0] = std::sin(2 * t); });
  const GroupPath Z = flow_shift_Z(T, h, w, 7);
  for (std::size_t k = 0; k < Z.size(); k += 5) CHECK((Z[k] - rot3(h.at(k, 0))).norm() < 1e-12);
  // right log-derivative of the flow is the driver
  const SampledPath b = right_log_derivative_b(T, solve_flow(T, GroupMat::Identity(), w));
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(b.at(k, 0) == doctest::Approx(w.at(k, 0)).epsilon(1e-12));
  CHECK(b_one(T, w)(0) == doctest::Approx(w.at(w.cells(), 0)).epsilon(1e-12));

  const FlowInputs in = standard_flow_inputs(T, 7);
  const FlowIdentityDefects d = flow_identity_defects(T, w, in.a, in.phi, in.h, 2);
  CHECK(d.left_translation < 1e-10);
  CHECK(d.zeta_identity < 1e-10);
  CHECK(d.Z_identity < 1e-10);
  CHECK(d.round_trip < 1e-10);
}

TEST_CASE("right log-derivative of a one-parameter subgroup") {
  const LieGroup G = LieGroup::so3();
  const AlgVec v(0.4, -1.2, 0.5);
  const SampledPath b = right_log_derivative_b(G, GroupPath::from_function(8, [&](double t) { return exp_alg(t * v); }));
  for (std::size_t k = 0; k < b.size(); k += 7)
    for (int i = 0; i < 3; ++i) CHECK(std::abs(b.at(k, i) - b.time(k) * v(i)) < 1e-12);
  const SampledPath zero = right_log_derivative_b(G, GroupPath::from_function(5, [](double) { return GroupMat::Identity(); }));
  CHECK(cm_norm(zero) == 0.0);
}

TEST_CASE("flow identities on SO(3) improve under refinement") {
  const LieGroup G = LieGroup::so3();
  const FlowInputs coarse = standard_flow_inputs(G, 6), fine = standard_flow_inputs(G, 8);
  const SampledPath w = sample_brownian(3, 8, SeededStream{54, 0});
  const FlowIdentityDefects d6 = flow_identity_defects(G, w.restrict_to(6), coarse.a, coarse.phi, coarse.h, 4);
  const FlowIdentityDefects d8 = flow_identity_defects(G, w, fine.a, fine.phi, fine.h, 4);
  CHECK(d8.zeta_identity < d6.zeta_identity / 3);
  CHECK(d8.Z_identity < d6.Z_identity / 3);
  CHECK(d8.round_trip < d6.round_trip / 3);
  CHECK(d8.left_translation < 1e-12);
}

TEST_CASE("flow continuity probe") {
  const LieGroup G = LieGroup::so3();
  const BesovParams p = BesovParams::standard(18, 0.70, 0.75);
  const SampledPath w = sample_brownian(3, 6, SeededStream{55, 0});
  const ContinuityProbe same = flow_continuity_probe(G, w, w, p);
  CHECK(same.flow_distance < 1e-14);
  CHECK(same.omega == 0.0);
  const ContinuityProbe near = flow_continuity_probe(G, w, w + SampledPath::linear(6, {1e-3, 0, 0}), p);
  CHECK(near.flow_distance > 0.0);
  CHECK(near.omega > 0.0);
}
