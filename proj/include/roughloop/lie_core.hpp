#pragma once

#include <Eigen/Dense>
#include <string>

#include "roughloop/error.hpp"

namespace roughloop {

// so(3) elements are carried in coordinates of the orthonormal basis
// {eps_1, eps_2, eps_3} for <X,Y> = tr(X^T Y)/2, so hat(eps_1) hat(eps_2) -
// hat(eps_2) hat(eps_1) = hat(eps_3) and the algebra norm is the Euclidean
// norm of the coordinate vector.
using AlgVec = Eigen::Vector3d;
using GroupMat = Eigen::Matrix3d;

Eigen::Matrix3d hat(const AlgVec& v);
AlgVec vee(const Eigen::Matrix3d& X);  // antisymmetric part
double antisymmetry_defect(const Eigen::Matrix3d& X);
double inner(const Eigen::Matrix3d& X, const Eigen::Matrix3d& Y);  // tr(X^T Y)/2

GroupMat exp_alg(const AlgVec& v);
// Principal logarithm. Throws ErrorCode::cut_locus when the rotation angle is
// within kCutLocusTol of pi.
AlgVec log_grp(const GroupMat& g);
inline constexpr double kCutLocusTol = 1e-8;
double rotation_angle(const GroupMat& g);

Eigen::Matrix3d ad(const AlgVec& v);
Eigen::Matrix3d Ad(const GroupMat& g);
AlgVec bracket(const AlgVec& a, const AlgVec& b);
Eigen::Matrix3d casimir_so3();

double orthogonality_defect(const GroupMat& g);  // ||g^T g - I||_F
GroupMat polar_renormalize(const GroupMat& g);
// Renormalizes only when the defect exceeds 1e-12; counts renormalizations.
GroupMat keep_orthogonal(const GroupMat& g, long* renormalized = nullptr);

struct GroupDistance {
  double value = 0.0;
  bool chordal = false;  // fell back to ||g - h||_F near the cut locus
};
GroupDistance group_distance(const GroupMat& g, const GroupMat& h);

enum class GroupKind { so3, torus };

// The concrete compact group behind a flow: SO(3), or the circle realized as
// rotations about eps_3 (an abelian one-dimensional stub). Driver paths carry
// dim() coordinates which embed into so(3).
class LieGroup {
 public:
  static LieGroup so3() { return LieGroup(GroupKind::so3); }
  static LieGroup torus() { return LieGroup(GroupKind::torus); }
  static LieGroup from_name(const std::string& name);

  GroupKind kind() const { return kind_; }
  int dim() const { return kind_ == GroupKind::so3 ? 3 : 1; }
  std::string name() const { return kind_ == GroupKind::so3 ? "so3" : "abelian-stub"; }

  AlgVec embed(const double* coords) const;
  void project(const AlgVec& v, double* coords) const;
  Eigen::VectorXd project(const AlgVec& v) const;
  AlgVec embed(const Eigen::VectorXd& coords) const { return embed(coords.data()); }

  Eigen::MatrixXd ad(const Eigen::VectorXd& v) const;  // dim x dim
  Eigen::MatrixXd casimir() const;                     // sum_i ad(e_i)^2 over the dim basis vectors

 private:
  explicit LieGroup(GroupKind k) : kind_(k) {}
  GroupKind kind_;
};

}  // namespace roughloop
