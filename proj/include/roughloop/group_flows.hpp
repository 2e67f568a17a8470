#pragma once

#include <functional>
#include <vector>

#include "roughloop/dyadic_paths.hpp"
#include "roughloop/lie_core.hpp"

namespace roughloop {

// Group-valued path on the dyadic grid of a level. Between grid points a
// GroupPath is read as the geodesic g_k exp(tau log(g_k^{-1} g_{k+1})).
struct GroupPath {
  int level = 0;
  std::vector<GroupMat> values;

  std::size_t size() const { return values.size(); }
  const GroupMat& operator[](std::size_t k) const { return values[k]; }
  double max_orthogonality_defect() const;

  static GroupPath from_function(int level, const std::function<GroupMat(double)>& f);
};

// Exact flow X_{k+1} = X_k exp(dw_k) of dX = X o dw for a piecewise-linear driver.
GroupPath solve_flow(const LieGroup& G, const GroupMat& a, const SampledPath& w);

// max over n_times evenly spread grid times of d(X(t,a,w), a X(t,e,w)).
double left_translation_defect(const LieGroup& G, const GroupMat& a, const SampledPath& w, int n_times);

// Oversampling used when an H-path is built along a flow: the shift is
// resolved on a grid 2^kDefaultOversample times finer than the driver.
inline constexpr int kDefaultOversample = 6;

// zeta(phi,w) with d/dt zeta = Ad(X(t,e,w)^{-1})(phi^{-1} phi'), at the level of
// phi (which must be at least the level of w). The right side is integrated in
// closed form over every cell: phi is geodesic there and X(t) = X_k exp(tau w').
SampledPath zeta(const LieGroup& G, const GroupPath& phi, const SampledPath& w);

// Z(t,h,w) with Z^{-1} Z' = Ad(X(t,e,w)) h', by fourth-order Magnus steps at
// the given level (>= levels of h and w).
GroupPath flow_shift_Z(const LieGroup& G, const SampledPath& h, const SampledPath& w, int level);

struct ContinuityProbe {
  double flow_distance = 0.0;
  double omega = 0.0;
};
ContinuityProbe flow_continuity_probe(const LieGroup& G, const SampledPath& w, const SampledPath& z,
                                      const BesovParams& p);

// b(t,gamma) = sum of log(gamma_{k+1} gamma_k^{-1}), projected to G's coordinates.
SampledPath right_log_derivative_b(const LieGroup& G, const GroupPath& gamma);

// b(1,w) = int_0^1 Ad(X(t,e,w)) o dw(t); exact for piecewise-linear w.
Eigen::VectorXd b_one(const LieGroup& G, const SampledPath& w);

// psi(a,w)_t = -int_0^t Ad(X(s,e,w)^{-1}) log a ds at the given level (>= w's).
SampledPath retraction_shift(const LieGroup& G, const GroupMat& a, const SampledPath& w, int level);

struct FlowIdentityDefects {
  double left_translation = 0.0;  // sup_t d(X(t,a,w), a X(t,e,w))
  double zeta_identity = 0.0;     // sup_t d(phi_t X(t,e,w), X(t,e,w + zeta(phi,w)))
  double Z_identity = 0.0;        // sup_t d(Z(t,h,w) X(t,e,w), X(t,e,w+h))
  double round_trip = 0.0;        // ||zeta(Z(.,h,w), w) - h||_H
};
// phi must start at e; h lives at the level of w. zeta and the round trip are
// resolved `oversample` levels finer than w.
FlowIdentityDefects flow_identity_defects(const LieGroup& G, const SampledPath& w, const GroupMat& a,
                                          const std::function<GroupMat(double)>& phi, const SampledPath& h,
                                          int oversample = kDefaultOversample);

}  // namespace roughloop
