#include "roughloop/lie_core.hpp"

#include <cmath>
#include <numbers>

namespace roughloop {

Eigen::Matrix3d hat(const AlgVec& v) {
  Eigen::Matrix3d X;
  X << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return X;
}

AlgVec vee(const Eigen::Matrix3d& X) {
  return AlgVec(0.5 * (X(2, 1) - X(1, 2)), 0.5 * (X(0, 2) - X(2, 0)), 0.5 * (X(1, 0) - X(0, 1)));
}

double antisymmetry_defect(const Eigen::Matrix3d& X) { return (X + X.transpose()).norm(); }

double inner(const Eigen::Matrix3d& X, const Eigen::Matrix3d& Y) { return 0.5 * (X.transpose() * Y).trace(); }

GroupMat exp_alg(const AlgVec& v) {
  const double th2 = v.squaredNorm();
  const double th = std::sqrt(th2);
  double a, b;  // sin(th)/th, (1-cos th)/th^2
  if (th < 1e-4) {
    a = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
    b = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
  } else {
    a = std::sin(th) / th;
    const double s = std::sin(0.5 * th);
    b = 2.0 * s * s / th2;
  }
  const Eigen::Matrix3d K = hat(v);
  return Eigen::Matrix3d::Identity() + a * K + b * (K * K);
}

double rotation_angle(const GroupMat& g) {
  // atan2 form stays accurate near 0 and pi, unlike acos of the trace.
  const AlgVec axis_sin = vee(g);  // sin(th) * axis
  const double c = 0.5 * (g.trace() - 1.0);
  return std::atan2(axis_sin.norm(), c);
}

AlgVec log_grp(const GroupMat& g) {
  const double th = rotation_angle(g);
  if (std::numbers::pi - th < kCutLocusTol)
    fail(ErrorCode::cut_locus, "log_grp: rotation angle within 1e-8 of pi (cut locus)");
  const AlgVec s = vee(g);
  if (th < 1e-4) {
    const double th2 = th * th;
    return s * (1.0 + th2 / 6.0 + 7.0 * th2 * th2 / 360.0);
  }
  if (th < 3.0) return s * (th / std::sin(th));
  // Near pi the antisymmetric part is tiny; recover the axis from the
  // symmetric part g + g^T = 2 cos(th) I + 2 (1 - cos th) a a^T.
  const Eigen::Matrix3d B = 0.5 * (g + g.transpose()) - std::cos(th) * Eigen::Matrix3d::Identity();
  int col = 0;
  B.diagonal().maxCoeff(&col);
  AlgVec axis = B.col(col) / std::sqrt(B(col, col) * (1.0 - std::cos(th)));
  axis.normalize();
  if (axis.dot(s) < 0.0) axis = -axis;
  return th * axis;
}

Eigen::Matrix3d ad(const AlgVec& v) { return hat(v); }

Eigen::Matrix3d Ad(const GroupMat& g) { return g; }

AlgVec bracket(const AlgVec& a, const AlgVec& b) { return a.cross(b); }

Eigen::Matrix3d casimir_so3() {
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Matrix3d A = ad(AlgVec::Unit(i));
    C += A * A;
  }
  return C;
}

double orthogonality_defect(const GroupMat& g) {
  return (g.transpose() * g - Eigen::Matrix3d::Identity()).norm();
}

GroupMat polar_renormalize(const GroupMat& g) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  GroupMat R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0)
    fail(ErrorCode::invalid_argument, "polar_renormalize: matrix is not close to SO(3)");
  return R;
}

GroupMat keep_orthogonal(const GroupMat& g, long* renormalized) {
  if (orthogonality_defect(g) <= 1e-12) return g;
  if (renormalized) ++*renormalized;
  return polar_renormalize(g);
}

GroupDistance group_distance(const GroupMat& g, const GroupMat& h) {
  const GroupMat q = g * h.transpose();
  const double th = rotation_angle(q);
  if (std::numbers::pi - th < kCutLocusTol) return {(g - h).norm(), true};
  return {th, false};
}

LieGroup LieGroup::from_name(const std::string& name) {
  if (name == "so3") return so3();
  if (name == "abelian-stub" || name == "torus") return torus();
  fail(ErrorCode::invalid_argument, "unknown group '" + name + "' (expected so3 or abelian-stub)");
}

AlgVec LieGroup::embed(const double* coords) const {
  if (kind_ == GroupKind::so3) return AlgVec(coords[0], coords[1], coords[2]);
  return AlgVec(0.0, 0.0, coords[0]);
}

void LieGroup::project(const AlgVec& v, double* coords) const {
  if (kind_ == GroupKind::so3) {
    coords[0] = v.x();
    coords[1] = v.y();
    coords[2] = v.z();
  } else {
    coords[0] = v.z();
  }
}

Eigen::VectorXd LieGroup::project(const AlgVec& v) const {
  Eigen::VectorXd out(dim());
  project(v, out.data());
  return out;
}

Eigen::MatrixXd LieGroup::ad(const Eigen::VectorXd& v) const {
  require(v.size() == dim(), ErrorCode::invalid_argument, "ad: coordinate vector has the wrong length");
  if (kind_ == GroupKind::torus) return Eigen::MatrixXd::Zero(1, 1);
  return roughloop::ad(AlgVec(v(0), v(1), v(2)));
}

Eigen::MatrixXd LieGroup::casimir() const {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    const Eigen::MatrixXd A = ad(Eigen::VectorXd::Unit(dim(), i));
    C += A * A;
  }
  return C;
}

}  // namespace roughloop
