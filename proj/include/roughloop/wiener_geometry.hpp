#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "roughloop/group_flows.hpp"
#include "roughloop/random.hpp"
#include "roughloop/rough_lift.hpp"

namespace roughloop {

// Open sets get three verdicts: a value within relative 1e-6 of its bound is
// reported as `boundary` rather than guessed.
enum class Verdict { inside, outside, boundary };
const char* verdict_name(Verdict v);
inline constexpr double kBoundaryBand = 1e-6;
Verdict classify(const std::vector<double>& values, double bound);

enum class BallKind {
  anchored,  // U_r(phi): constraints on w - phi
  centered,  // U_{r,phi}: the same constraints with w in place of w - phi
};

struct BallSpec {
  SampledPath center;
  double r = 1.0;
  BesovParams params;
  BallKind kind = BallKind::anchored;
};

// The 3d(d+1)/2 constraint values, in the order: increment norms (d), mutual
// areas j<k, C(phi^i, x^j) for i<=j, C(x^i, phi^j) for i<=j; x = w - phi or w.
std::vector<double> ball_constraint_values(const BallSpec& ball, const SampledPath& w);
Verdict member_U(const BallSpec& ball, const SampledPath& w);

Verdict member_V(const Level2Lift& z, double r, const Level2Lift& w, const BesovParams& p);

struct TubeSpec {
  double epsilon = 0.3;
  double pin_tol = 1e-6;
  // Level at which retracted paths are resolved; output level is
  // max(w.level, resolve_level).
  int resolve_level = kDefaultLevel + kDefaultOversample;
};

double pin_distance(const LieGroup& G, const SampledPath& w);  // d(X(1,e,w), e)
Verdict member_tube(const LieGroup& G, const TubeSpec& tube, const SampledPath& w);

struct Retraction {
  SampledPath path;
  SampledPath shift;
  double pin_distance = 0.0;
};
// Psi(w) = w + psi(X(1,e,w), w). Throws ErrorCode::outside_domain when w is
// outside the tube and ErrorCode::invalid_argument if the pin tolerance is missed.
Retraction retract(const LieGroup& G, const TubeSpec& tube, const SampledPath& w);

double quasi_invariance_weight(const LieGroup& G, const GroupMat& a, const SampledPath& w);

struct PathFunctional {
  std::string name;
  std::function<double(const SampledPath&)> F;
};

struct QuasiInvarianceRow {
  std::string name;
  EstimateCI shifted;   // E[F(w + psi(a,w))]
  EstimateCI weighted;  // E[F(w) weight(a, w)], weight = exp(-(log a, b(1,w)) - |log a|^2/2)
  EstimateCI defect;    // paired difference
  bool within_3sigma = false;
};

// Both sides of the change of variables for a fixed a, from n_samples drivers
// at `level`; shifts are resolved `oversample` levels finer.
std::vector<QuasiInvarianceRow> quasi_invariance_mc(const LieGroup& G, const GroupMat& a,
                                                    const std::vector<PathFunctional>& functionals, int level,
                                                    std::size_t n_samples, SeededStream stream, int workers = 1,
                                                    int oversample = 4);

double covering_kappa(double eps, int n, int K, double R, const std::function<double(double)>& F);

// A default modulus for covering_kappa: the line F(s) = slope (1 + s) lying
// above every sampled ratio flow_distance / omega, with s the driver size
// max_i ||w^i||_{m,theta/2} + ||C(w,w)||_{m,theta}. Fitted from
// flow_continuity_probe on scaled Brownian drivers; it is an empirical
// envelope, not a proven bound.
struct EmpiricalModulus {
  double slope = 0.0;
  std::size_t probes = 0;
  double operator()(double s) const { return slope * (1.0 + s); }
};
EmpiricalModulus fit_empirical_modulus(const LieGroup& G, int level, int n_probes, SeededStream stream,
                                       const BesovParams& p);

struct InclusionReport {
  double lhs = 0.0;        // max_i ||phi1^i - phi2^i||_H
  double threshold = 0.0;  // delta r / (1 + 3r + 2 max_i ||phi1^i||_{m,theta/2})
  bool hypothesis_holds = false;
  double scale = 0.0;            // Brownian scale used by the member sampler
  double acceptance_rate = 0.0;  // of the final rejection stage
  std::size_t probes = 0;
  std::size_t boundary_discarded = 0;
  std::size_t counterexamples_U = 0;
  double v_radius = 0.0;  // R (5 + 6 max_i ||phi1^i||_{m,theta/2}) r, reported when r < 1
  std::size_t counterexamples_V = 0;
  std::optional<SampledPath> first_counterexample;
};

// Probes U_r(phi1) subset U_{(1+delta)r}(phi2) (and the V-ball inclusion with
// the supplied R). Members of U_r(phi1) are drawn as phi1 + s B with B
// Brownian: s starts at 1 and halves until a pilot batch of 64 accepts at
// least a quarter of its candidates, then candidates are rejection-sampled.
InclusionReport inclusion_check(const SampledPath& phi1, const SampledPath& phi2, double r, double delta,
                                int n_probes, SeededStream stream, const BesovParams& p, double R_est,
                                int workers = 1);

}  // namespace roughloop
