#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "roughloop/dyadic_paths.hpp"
#include "roughloop/random.hpp"

namespace roughloop {

// Runs fn(i) for i in [0,n) on `workers` threads. Callers write results into
// slot i, so the outcome never depends on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Brownian path with i.i.d. N(0, 2^-M I_d) increments.
SampledPath sample_brownian(int d, int M, SeededStream stream);

// z(N) = w(N) - w(N-1), N >= 1.
SampledPath increment_layer(const SampledPath& w, int N);

inline constexpr int kConvergenceStats = 4;
inline const std::array<std::string, kConvergenceStats> kConvergenceStatNames = {
    "layer_norm", "area_step", "cross_area", "cross_product"};

struct ConvergenceRow {
  int N = 0;
  std::array<EstimateCI, kConvergenceStats> mean;
  std::array<double, kConvergenceStats> median{};
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::array<SlopeFit, kConvergenceStats> slope;
  // per_seed[s][r][k]: statistic k at row r for seed s
  std::vector<std::vector<std::array<double, kConvergenceStats>>> per_seed;
};

// The four per-seed statistics at level N: ||z(N)||_{m,theta/2},
// ||C(w(N+1),w(N+1)) - C(w(N),w(N))||_{m,theta}, ||C(w(N)^perp, w(N))||_{m,theta}
// and ||(w(N)^perp) . (w(N))||_{m,theta}; matrix grids use the Frobenius norm.
std::array<double, kConvergenceStats> convergence_statistics(const SampledPath& w, int N, const BesovParams& p);

ConvergenceTable convergence_experiment(int d, int M, int N_lo, int N_hi, const BesovParams& p, int n_seeds,
                                        SeededStream stream, int workers = 1, int n_boot = 1000);

// The one-step area difference assembled from its four-term decomposition in z(N+1).
SimplexGrid area_step_decomposed(const SampledPath& w, int N, int i, int j);
SimplexGrid area_step_direct(const SampledPath& w, int N, int i, int j);

struct SmallBallConstraint {
  std::string label;
  double bound = 0.0;
  std::function<double(const SampledPath&)> value;  // evaluated on w(N)
};

struct SmallBallResult {
  EstimateCI estimate;
  std::size_t accepted = 0;
  std::size_t boundary = 0;  // samples discarded inside the relative 1e-6 band
};

// Monte Carlo probability that w(N) (d = 1) satisfies every constraint.
// Samples use the exact Brownian values at k/2^N, resampled to `quad_level`.
SmallBallResult small_ball_estimate(const std::vector<SmallBallConstraint>& constraints, int N, int n_seeds,
                                    SeededStream stream, int quad_level, int workers = 1);

// U_N(z^1..z^l; eps): ||w(N)||_{m,theta'/2}, ||C(w(N),z^i)||_{m,theta}, ||C(z^i,w(N))||_{m,theta} < eps.
std::vector<SmallBallConstraint> positivity_constraints(const std::vector<SampledPath>& z, double eps,
                                                        const BesovParams& p);

}  // namespace roughloop
