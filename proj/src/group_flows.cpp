#include "roughloop/group_flows.hpp"

#include <algorithm>
#include <cmath>

#include "roughloop/rough_lift.hpp"

namespace roughloop {

double GroupPath::max_orthogonality_defect() const {
  double worst = 0.0;
  for (const auto& g : values) worst = std::max(worst, orthogonality_defect(g));
  return worst;
}

GroupPath GroupPath::from_function(int level, const std::function<GroupMat(double)>& f) {
  require(level >= 0 && level <= 24, ErrorCode::invalid_argument, "level must be in [0,24]");
  GroupPath out;
  out.level = level;
  const std::size_t n = std::size_t{1} << level;
  out.values.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out.values.push_back(f(static_cast<double>(k) / static_cast<double>(n)));
  return out;
}

namespace {

AlgVec increment(const LieGroup& G, const SampledPath& w, std::size_t k) {
  double buf[3];
  for (int i = 0; i < w.dim(); ++i) buf[i] = w.at(k + 1, i) - w.at(k, i);
  return G.embed(buf);
}

void require_driver(const LieGroup& G, const SampledPath& w, const char* who) {
  if (w.dim() != G.dim())
    fail(ErrorCode::invalid_argument, std::string(who) + ": driver dimension must equal the group dimension");
}

// int_0^h exp(-tau hat(omega)) d tau.
Eigen::Matrix3d cell_integral(const AlgVec& omega, double h) {
  const double th = omega.norm() * h;
  const double th2 = th * th;
  double c1, c2;  // (1 - cos th)/th^2, (th - sin th)/th^3
  if (th < 1e-3) {
    c1 = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
    c2 = 1.0 / 6.0 - th2 / 120.0 + th2 * th2 / 5040.0;
  } else {
    const double s = std::sin(0.5 * th);
    c1 = 2.0 * s * s / th2;
    c2 = (th - std::sin(th)) / (th2 * th);
  }
  const Eigen::Matrix3d W = hat(omega);
  return h * Eigen::Matrix3d::Identity() - h * h * c1 * W + h * h * h * c2 * (W * W);
}

// Walks the exact flow of w refined to `level`: at fine cell l it exposes the
// flow value at the left node and the driver velocity on the cell.
class FineFlow {
 public:
  FineFlow(const LieGroup& G, const SampledPath& w, int level)
      : G_(G), w_(w), ratio_(std::size_t{1} << (level - w.level())), hw_(w.step()) {
    require(level >= w.level(), ErrorCode::invalid_argument, "target level must not be coarser than the driver");
    X_ = GroupMat::Identity();
    load(0);
  }

  const GroupMat& X() const { return X_; }
  const AlgVec& velocity() const { return velocity_; }
  const GroupMat& step_map() const { return step_; }

  void advance(std::size_t l) {  // move from fine node l to l+1
    X_ = keep_orthogonal(X_ * step_);
    if ((l + 1) % ratio_ == 0 && (l + 1) / ratio_ < w_.cells()) load((l + 1) / ratio_);
  }

 private:
  void load(std::size_t c) {
    const AlgVec dw = increment(G_, w_, c);
    velocity_ = dw / hw_;
    step_ = exp_alg(dw / static_cast<double>(ratio_));
  }

  const LieGroup& G_;
  const SampledPath& w_;
  std::size_t ratio_;
  double hw_;
  GroupMat X_, step_;
  AlgVec velocity_;
};

}  // namespace

GroupPath solve_flow(const LieGroup& G, const GroupMat& a, const SampledPath& w) {
  require_driver(G, w, "solve_flow");
  GroupPath out;
  out.level = w.level();
  out.values.resize(w.size());
  out.values[0] = a;
  for (std::size_t k = 0; k < w.cells(); ++k)
    out.values[k + 1] = keep_orthogonal(out.values[k] * exp_alg(increment(G, w, k)));
  return out;
}

double left_translation_defect(const LieGroup& G, const GroupMat& a, const SampledPath& w, int n_times) {
  require(n_times >= 1, ErrorCode::invalid_argument, "left_translation_defect: n_times must be positive");
  const GroupPath Xa = solve_flow(G, a, w);
  const GroupPath Xe = solve_flow(G, GroupMat::Identity(), w);
  const std::size_t n = w.cells();
  double worst = 0.0;
  for (int i = 0; i < n_times; ++i) {
    const std::size_t k = n_times == 1 ? n : static_cast<std::size_t>(std::llround(static_cast<double>(i) * n / (n_times - 1)));
    worst = std::max(worst, group_distance(Xa[k], a * Xe[k]).value);
  }
  return worst;
}

SampledPath zeta(const LieGroup& G, const GroupPath& phi, const SampledPath& w) {
  require_driver(G, w, "zeta");
  require(phi.level >= w.level(), ErrorCode::invalid_argument, "zeta: phi must be sampled at least as finely as w");
  require(phi.size() == (std::size_t{1} << phi.level) + 1, ErrorCode::invalid_argument, "zeta: malformed group path");
  if ((phi[0] - GroupMat::Identity()).norm() > 1e-12) fail(ErrorCode::invalid_argument, "zeta: phi must start at e");

  const int L = phi.level;
  const std::size_t n = std::size_t{1} << L;
  const double h = 1.0 / static_cast<double>(n);
  const int d = G.dim();
  std::vector<double> vals(static_cast<std::size_t>(d) * (n + 1), 0.0);
  FineFlow flow(G, w, L);
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double coords[3];
  for (std::size_t l = 0; l < n; ++l) {
    const AlgVec u = log_grp(phi[l].transpose() * phi[l + 1]) / h;
    acc += cell_integral(flow.velocity(), h) * (flow.X().transpose() * u);
    G.project(acc, coords);
    for (int i = 0; i < d; ++i) vals[static_cast<std::size_t>(i) * (n + 1) + l + 1] = coords[i];
    flow.advance(l);
  }
  return SampledPath::from_values(d, L, std::move(vals));
}

GroupPath flow_shift_Z(const LieGroup& G, const SampledPath& h, const SampledPath& w, int level) {
  require_driver(G, w, "flow_shift_Z");
  require_driver(G, h, "flow_shift_Z");
  require(level >= h.level() && level >= w.level(), ErrorCode::invalid_argument,
          "flow_shift_Z: level must be at least the levels of h and w");
  const SampledPath hf = h.upsample(level);
  const std::size_t n = hf.cells();
  const double dt = hf.step();
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double comm = std::sqrt(3.0) / 12.0 * dt * dt;

  GroupPath out;
  out.level = level;
  out.values.resize(n + 1);
  out.values[0] = GroupMat::Identity();
  FineFlow flow(G, w, level);
  for (std::size_t l = 0; l < n; ++l) {
    const AlgVec hdot = increment(G, hf, l) / dt;
    const AlgVec v = flow.velocity();
    const AlgVec A1 = flow.X() * exp_alg(c1 * dt * v) * hdot;
    const AlgVec A2 = flow.X() * exp_alg(c2 * dt * v) * hdot;
    const AlgVec Omega = 0.5 * dt * (A1 + A2) + comm * bracket(A1, A2);
    out.values[l + 1] = keep_orthogonal(out.values[l] * exp_alg(Omega));
    flow.advance(l);
  }
  return out;
}

ContinuityProbe flow_continuity_probe(const LieGroup& G, const SampledPath& w, const SampledPath& z,
                                      const BesovParams& p) {
  require_same_shape(w, z, "flow_continuity_probe");
  const GroupPath Xw = solve_flow(G, GroupMat::Identity(), w);
  const GroupPath Xz = solve_flow(G, GroupMat::Identity(), z);
  ContinuityProbe out;
  for (std::size_t k = 0; k < Xw.size(); ++k)
    out.flow_distance = std::max(out.flow_distance, group_distance(Xw[k], Xz[k]).value);
  out.omega = omega_distance(lift(w), lift(z), p);
  return out;
}

SampledPath right_log_derivative_b(const LieGroup& G, const GroupPath& gamma) {
  const std::size_t n = gamma.size() - 1;
  const int d = G.dim();
  std::vector<double> vals(static_cast<std::size_t>(d) * (n + 1), 0.0);
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double coords[3];
  for (std::size_t k = 0; k < n; ++k) {
    acc += log_grp(gamma[k + 1] * gamma[k].transpose());
    G.project(acc, coords);
    for (int i = 0; i < d; ++i) vals[static_cast<std::size_t>(i) * (n + 1) + k + 1] = coords[i];
  }
  return SampledPath::from_values(d, gamma.level, std::move(vals));
}

Eigen::VectorXd b_one(const LieGroup& G, const SampledPath& w) {
  require_driver(G, w, "b_one");
  GroupMat X = GroupMat::Identity();
  AlgVec acc = AlgVec::Zero();
  for (std::size_t k = 0; k < w.cells(); ++k) {
    const AlgVec dw = increment(G, w, k);
    acc += X * dw;  // Ad(X(t)) dw is constant along the cell
    X = keep_orthogonal(X * exp_alg(dw));
  }
  return G.project(acc);
}

SampledPath retraction_shift(const LieGroup& G, const GroupMat& a, const SampledPath& w, int level) {
  require_driver(G, w, "retraction_shift");
  const AlgVec u = -log_grp(a);
  const std::size_t n = std::size_t{1} << level;
  const double h = 1.0 / static_cast<double>(n);
  const int d = G.dim();
  std::vector<double> vals(static_cast<std::size_t>(d) * (n + 1), 0.0);
  FineFlow flow(G, w, level);
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double coords[3];
  for (std::size_t l = 0; l < n; ++l) {
    acc += cell_integral(flow.velocity(), h) * (flow.X().transpose() * u);
    G.project(acc, coords);
    for (int i = 0; i < d; ++i) vals[static_cast<std::size_t>(i) * (n + 1) + l + 1] = coords[i];
    flow.advance(l);
  }
  return SampledPath::from_values(d, level, std::move(vals));
}

FlowIdentityDefects flow_identity_defects(const LieGroup& G, const SampledPath& w, const GroupMat& a,
                                          const std::function<GroupMat(double)>& phi, const SampledPath& h,
                                          int oversample) {
  require_same_shape(w, h, "flow_identity_defects");
  const int L = w.level() + oversample;
  FlowIdentityDefects out;
  out.left_translation = left_translation_defect(G, a, w, 17);

  const GroupPath phiL = GroupPath::from_function(L, phi);
  const SampledPath wf = w.upsample(L);
  const GroupPath Xe = solve_flow(G, GroupMat::Identity(), wf);
  const GroupPath Xz = solve_flow(G, GroupMat::Identity(), wf + zeta(G, phiL, w));
  for (std::size_t k = 0; k < Xe.size(); ++k)
    out.zeta_identity = std::max(out.zeta_identity, group_distance(phiL[k] * Xe[k], Xz[k]).value);

  const GroupPath Z = flow_shift_Z(G, h, w, w.level());
  const GroupPath X = solve_flow(G, GroupMat::Identity(), w);
  const GroupPath Xh = solve_flow(G, GroupMat::Identity(), w + h);
  for (std::size_t k = 0; k < X.size(); ++k)
    out.Z_identity = std::max(out.Z_identity, group_distance(Z[k] * X[k], Xh[k]).value);

  out.round_trip = cm_norm(zeta(G, flow_shift_Z(G, h, w, L), w) - h.upsample(L));
  return out;
}

}  // namespace roughloop
