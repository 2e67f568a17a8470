#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roughloop/group_flows.hpp"
#include "roughloop/random.hpp"
#include "roughloop/wiener_geometry.hpp"

namespace roughloop {

// Sine frame of H_0: e_{k,i}(t) = c_k sqrt(2) sin(k pi t)/(k pi) eps_i, k = 1..K,
// i = 1..dim. c_k = 1/sinc(k pi 2^-M / 2) makes the sampled frame exactly
// orthonormal for the discrete Cameron-Martin product.
class H0Frame {
 public:
  H0Frame(const LieGroup& G, int K, int level);

  int modes() const { return K_; }
  int level() const { return level_; }
  std::size_t size() const { return basis_.size(); }
  const SampledPath& operator[](std::size_t i) const { return basis_[i]; }
  const std::vector<SampledPath>& basis() const { return basis_; }
  // Index of e_{k,i} (k from 1, i from 0).
  std::size_t index(int k, int i) const { return static_cast<std::size_t>((k - 1) * dim_ + i); }
  static SampledPath mode(int dim, int k, int i, int level);

 private:
  int K_, level_, dim_;
  std::vector<SampledPath> basis_;
};

// A 1-form on the loop group at a fixed loop, stored through its Riesz path
// alpha_t in H_0, so (alpha, h) = int <alpha'_t, h'_t> dt = cm_inner(alpha, h).
struct LoopOneForm {
  SampledPath path;

  double pair(const SampledPath& h) const { return cm_inner(path, h); }
  LoopOneForm operator+(const LoopOneForm& o) const { return {path + o.path}; }
  LoopOneForm operator*(double c) const { return {path * c}; }
};

SampledPath bracket_path(const LieGroup& G, const SampledPath& h, const SampledPath& k);

// -P_0 int_0^t [h_s, k'_s] ds, with P_0 x = x_t - t x_1. Cell integrals are
// exact for the piecewise-linear interpolants.
SampledPath connection(const LieGroup& G, const SampledPath& h, const SampledPath& k);

struct ConnectionDefects {
  double torsion = 0.0;  // ||nabla_h k - nabla_k h - [k,h]||_H
  double metric = 0.0;   // |<nabla_h k, l>_H + <k, nabla_h l>_H|
  double max() const { return torsion > metric ? torsion : metric; }
};
ConnectionDefects metric_compatibility_defect(const LieGroup& G, const SampledPath& h, const SampledPath& k,
                                              const SampledPath& l);

// (T_v alpha)_t = int_0^t [alpha_s, v] ds - t int_0^1 [alpha_s, v] ds.
LoopOneForm T_v(const LieGroup& G, const LoopOneForm& alpha, const Eigen::VectorXd& v);

struct CasimirTerms {
  double T2 = 0.0;  // int <(Cas alpha)_t, h_t> dt
  double T3 = 0.0;  // -<int Cas alpha_t dt, int h_s ds>
};
CasimirTerms casimir_terms(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h);

using PairingTerm = std::function<double(const LoopOneForm&, const SampledPath&)>;

// laplacian_term(alpha, h) + (alpha, h) + (T_{b1} alpha, h) + T2 + T3.
double weitzenboeck_rhs(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h, const Eigen::VectorXd& b1,
                        const PairingTerm& laplacian_term);

struct WeitzenboeckSums {
  int K = 0;
  double S1 = 0.0;  // sum_i alpha(nabla_{e_i} nabla_{e_i} h)
  double S2 = 0.0;  // 1/2 sum_{i,j} alpha([e_j,e_i]) ([e_j,e_i], h)_H
  double total() const { return S1 + S2; }
};
WeitzenboeckSums weitzenboeck_sums(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h, int K);

struct WeitzenboeckStudy {
  std::vector<WeitzenboeckSums> sums;  // one per K, in the order given
  double closed = 0.0;                 // T2 + T3
  double relative_error() const;       // of the last total against `closed`
  bool cauchy() const;                 // successive differences of S1, S2 and S1+S2 decrease
};
WeitzenboeckStudy weitzenboeck_truncation(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h,
                                          const std::vector<int>& Ks);

// Smooth functional of a loop through its values at finitely many times.
struct LoopFunctional {
  std::vector<double> times;  // dyadic at the sampling level
  std::function<double(const std::vector<GroupMat>&)> F;
};

struct IbpReport {
  std::string sampler;      // "bridge" (exact, abelian) or "tube"
  EstimateCI lhs;           // E[X_h f g]
  EstimateCI rhs;           // E[f (-X_h g + (h,b) g)]
  EstimateCI defect;        // paired lhs - rhs
  bool within_3sigma = false;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  EstimateCI raw_defect;    // tube only: unweighted retracted samples
  EstimateCI bias;          // tube only: paired raw minus reweighted defect
};

struct IbpSettings {
  int level = 6;                // driver level
  std::size_t n_samples = 10000;
  double fd_step = 1e-4;
  int workers = 1;
};

// Integration by parts on pinned loops. The abelian stub samples the pinned
// measure exactly through Brownian bridges. SO(3) rejects drivers into the
// tube, retracts them onto the loop space and reweights by 1/rho with
// rho(w') = int_{|u|<eps} exp(<u, b(1,w')> - |u|^2/2) J(|u|) du, J the Haar
// density in exponential coordinates.
IbpReport ibp_mc_check(const LieGroup& G, const LoopFunctional& f, const LoopFunctional& g, const SampledPath& h,
                       const TubeSpec& tube, const IbpSettings& settings, SeededStream stream);

double tube_density_rho(double epsilon, double b_norm);

}  // namespace roughloop
