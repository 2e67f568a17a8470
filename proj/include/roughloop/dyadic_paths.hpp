#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "roughloop/error.hpp"

namespace roughloop {

struct BesovParams {
  int m = 18;
  double theta = 0.70;
  double theta_prime = 0.75;
  bool relaxed = false;

  // Throws ErrorCode::invalid_argument when the parameter triple is outside
  // the standing assumptions (or the relaxed ones when `relaxed` is set).
  void validate() const;
  static BesovParams standard(int m, double theta, double theta_prime);
  static BesovParams relaxed_params(int m, double theta, double theta_prime);
};

inline constexpr int kDefaultLevel = 12;

// d-dimensional path on the dyadic grid k/2^M, piecewise linear in between,
// starting at the origin. Storage is component-major.
class SampledPath {
 public:
  SampledPath() = default;
  SampledPath(int dim, int level);  // zero path
  static SampledPath from_values(int dim, int level, std::vector<double> component_major);
  static SampledPath from_points(int dim, int level, const std::vector<std::vector<double>>& points);
  static SampledPath from_function(int dim, int level, const std::function<void(double, double*)>& f);
  static SampledPath linear(int level, const std::vector<double>& v);  // t * v

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return n_ + 1; }
  std::size_t cells() const { return n_; }
  double step() const { return 1.0 / static_cast<double>(n_); }
  double time(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(n_); }

  std::span<const double> component(int i) const {
    return {values_.data() + static_cast<std::size_t>(i) * (n_ + 1), n_ + 1};
  }
  double at(std::size_t k, int i) const { return values_[static_cast<std::size_t>(i) * (n_ + 1) + k]; }
  std::vector<double> point(std::size_t k) const;
  const std::vector<double>& raw() const { return values_; }

  SampledPath component_path(int i) const;
  // Exact refinement of the piecewise-linear interpolant to level L >= level().
  SampledPath upsample(int L) const;
  // Exact values at the coarser grid k/2^N.
  SampledPath restrict_to(int N) const;

  SampledPath operator+(const SampledPath& o) const;
  SampledPath operator-(const SampledPath& o) const;
  SampledPath operator*(double c) const;

 private:
  int dim_ = 0;
  int level_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

inline SampledPath operator*(double c, const SampledPath& p) { return p * c; }

void require_same_shape(const SampledPath& a, const SampledPath& b, const char* who);

SampledPath dyadic_approx(const SampledPath& w, int N);
SampledPath dyadic_complement(const SampledPath& w, int N);
double cm_norm(const SampledPath& h);
// Discrete Cameron-Martin inner product sum_k <Δa_k, Δb_k> 2^M.
double cm_inner(const SampledPath& a, const SampledPath& b);

// Function on the discrete simplex 0 <= s <= t <= 1 at resolution 2^M, with
// one or more real components (a d x d matrix grid has d*d components,
// row-major). Grids built from paths are lazy sums of increment, product and
// area terms, each O(1) per pair, so norms can stream over all O(4^M) pairs.
class SimplexGrid {
 public:
  enum class TermKind { increment, product, area };

  struct Term {
    TermKind kind;
    double coef;
    std::shared_ptr<const std::vector<double>> x;
    std::shared_ptr<const std::vector<double>> y;
    std::shared_ptr<const std::vector<double>> prefix;  // running integral of x dy (area only)
  };

  SimplexGrid() = default;

  static SimplexGrid increments(const SampledPath& x);              // dim components
  static SimplexGrid product(std::span<const double> x, std::span<const double> y, int level);
  static SimplexGrid area(std::span<const double> x, std::span<const double> y, int level);
  static SimplexGrid zero(int level, int ncomp = 1);
  // Dense grid from a pointwise callback f(j, k, out[ncomp]); level <= 9.
  static SimplexGrid dense(int level, int ncomp, const std::function<void(std::size_t, std::size_t, double*)>& f);

  int level() const { return level_; }
  int components() const { return ncomp_; }
  std::size_t size() const { return n_ + 1; }
  bool is_dense() const { return dense_ != nullptr; }

  double value(int comp, std::size_t j, std::size_t k) const;
  // out[k - j] = value(comp, j, k) for k = j .. 2^M.
  void row(int comp, std::size_t j, double* out) const;

  SimplexGrid component_grid(int comp) const;
  // Concatenate the components of several grids on one level.
  static SimplexGrid stack(const std::vector<SimplexGrid>& parts);
  SimplexGrid materialize() const;  // level <= 9

  SimplexGrid operator+(const SimplexGrid& o) const;
  SimplexGrid operator-(const SimplexGrid& o) const;
  SimplexGrid operator*(double c) const;

  static constexpr int kMaxDenseLevel = 9;

 private:
  int level_ = 0;
  int ncomp_ = 0;
  std::size_t n_ = 0;
  std::vector<std::vector<Term>> terms_;
  std::shared_ptr<const std::vector<double>> dense_;  // ncomp * (n+1)^2, row-major per component
};

inline SimplexGrid operator*(double c, const SimplexGrid& g) { return g * c; }

double besov_norm(const SimplexGrid& phi, int m, double theta);
double hoelder_norm(const SimplexGrid& phi, double theta);
double path_besov_norm(const SampledPath& x, int m, double theta);
double path_hoelder_norm(const SampledPath& x, double theta);
SimplexGrid pair_product_grid(const SampledPath& x, int i, const SampledPath& y, int j);

// Empirical lower estimates of the suprema M_{m,theta} and N_{m,theta}.
struct EmbeddingConstants {
  double M = 0.0;
  double N = 0.0;
  std::size_t samples = 0;
  double R() const { return std::max(M * M, N); }
};
EmbeddingConstants estimate_embedding_constants(const std::vector<SampledPath>& batch, const BesovParams& p);

}  // namespace roughloop
