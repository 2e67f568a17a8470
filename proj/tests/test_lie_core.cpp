#include <doctest.h>

#include <cmath>

#include "roughloop/error.hpp"
#include "roughloop/lie_core.hpp"
#include "roughloop/random.hpp"

using namespace roughloop;

namespace {

AlgVec random_vec(RandomSource& rng, double scale = 1.0) {
  return scale * AlgVec(rng.normal(), rng.normal(), rng.normal());
}

}  // namespace

TEST_CASE("exponential at textbook points") {
  CHECK((exp_alg(AlgVec::Zero()) - GroupMat::Identity()).norm() == 0.0);
  const GroupMat R = exp_alg(AlgVec(M_PI, 0, 0));
  GroupMat expect;
  expect << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  CHECK((R - expect).norm() < 1e-15);
  // rotation about e3 by a quarter turn
  GroupMat q;
  q << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((exp_alg(AlgVec(0, 0, M_PI / 2)) - q).norm() < 1e-15);
}

TEST_CASE("exp and log round trip") {
  RandomSource rng(SeededStream{40, 0});
  for (int i = 0; i < 200; ++i) {
    AlgVec v = random_vec(rng);
    if (v.norm() > 3.0) v *= 3.0 / v.norm();
    CHECK((log_grp(exp_alg(v)) - v).norm() < 1e-12);
    CHECK(orthogonality_defect(exp_alg(v)) < 1e-14);
  }
  for (double th : {1e-9, 1e-5, 1e-3, 3.05, M_PI - 1e-6}) {
    const AlgVec v = th * AlgVec(1, 2, -2) / 3.0;
    CHECK((log_grp(exp_alg(v)) - v).norm() < 1e-9);
  }
  CHECK_THROWS_AS(log_grp(exp_alg(AlgVec(0, M_PI, 0))), Error);
}

TEST_CASE("hat, vee and the normalized inner product") {
  RandomSource rng(SeededStream{40, 1});
  const AlgVec a = random_vec(rng), b = random_vec(rng);
  CHECK((vee(hat(a)) - a).norm() < 1e-15);
  CHECK(inner(hat(a), hat(b)) == doctest::Approx(a.dot(b)));
  CHECK(antisymmetry_defect(hat(a)) == 0.0);
}

TEST_CASE("structure constants and adjoint actions") {
  const AlgVec e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
  // direct commutator of the 3x3 generators
  const Eigen::Matrix3d comm = hat(e1) * hat(e2) - hat(e2) * hat(e1);
  CHECK((vee(comm) - e3).norm() < 1e-15);
  CHECK((ad(e1) * e2 - e3).norm() < 1e-15);
  RandomSource rng(SeededStream{40, 2});
  for (int i = 0; i < 20; ++i) {
    const AlgVec v = random_vec(rng), x = random_vec(rng), y = random_vec(rng);
    CHECK((ad(v) * v).norm() < 1e-15);
    CHECK(std::abs((ad(v) * x).dot(y) + x.dot(ad(v) * y)) < 1e-13);
    CHECK((bracket(x, y) - vee(hat(x) * hat(y) - hat(y) * hat(x))).norm() < 1e-13);
    const GroupMat g = exp_alg(random_vec(rng));
    CHECK((hat(Ad(g) * x) - g * hat(x) * g.transpose()).norm() < 1e-13);
  }
}

TEST_CASE("Casimir operator") {
  Eigen::Matrix3d brute = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Matrix3d A = ad(AlgVec::Unit(i));
    brute += A * A;
  }
  CHECK((casimir_so3() + 2.0 * Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK((casimir_so3() - brute).norm() < 1e-14);
  CHECK((LieGroup::so3().casimir() - brute).norm() < 1e-14);
  RandomSource rng(SeededStream{40, 3});
  for (int i = 0; i < 10; ++i) {
    const Eigen::Matrix3d A = ad(random_vec(rng));
    CHECK((casimir_so3() * A - A * casimir_so3()).norm() < 1e-13);
  }
  const LieGroup T = LieGroup::torus();
  CHECK(T.casimir().norm() == 0.0);
  CHECK(T.ad(Eigen::VectorXd::Ones(1)).norm() == 0.0);
}

TEST_CASE("group distance and renormalization") {
  RandomSource rng(SeededStream{40, 4});
  const GroupMat g = exp_alg(random_vec(rng, 0.5)), h = exp_alg(random_vec(rng, 0.5));
  CHECK(group_distance(g, g).value < 1e-14);
  CHECK(group_distance(g, h).value == doctest::Approx(log_grp(g * h.transpose()).norm()));
  const GroupDistance far = group_distance(exp_alg(AlgVec(0, 0, M_PI)), GroupMat::Identity());
  CHECK(far.chordal);
  GroupMat noisy = g;
  noisy(0, 1) += 1e-9;
  CHECK(orthogonality_defect(polar_renormalize(noisy)) < 1e-14);
  long count = 0;
  CHECK(orthogonality_defect(keep_orthogonal(noisy, &count)) < 1e-14);
  CHECK(count == 1);
  keep_orthogonal(g, &count);
  CHECK(count == 1);
}

TEST_CASE("group names") {
  CHECK(LieGroup::from_name("so3").kind() == GroupKind::so3);
  CHECK(LieGroup::from_name("abelian-stub").dim() == 1);
  CHECK_THROWS_AS(LieGroup::from_name("su2"), Error);
}
