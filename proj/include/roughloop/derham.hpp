#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roughloop/dyadic_paths.hpp"
#include "roughloop/random.hpp"

namespace roughloop {

struct QuadratureRule {
  std::vector<double> nodes;  // on [0,1]
  std::vector<double> weights;
};
// Gauss-Legendre rule with n nodes on [0,1] (Golub-Welsch); exact for degree 2n-1.
const QuadratureRule& gauss_legendre(int n);

using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// alpha(z) = sum beta_i(z) dx^i + sum gamma_j(z) dy^j with z = (x, y),
// x in R^n and y in R^m. coeffs returns (beta, gamma) stacked.
struct FiniteForm1 {
  int n = 0;
  int m = 0;
  Field coeffs;
  std::function<bool(const Eigen::VectorXd&)> domain;  // empty means all of R^{n+m}

  int dim() const { return n + m; }
  bool contains(const Eigen::VectorXd& z) const { return !domain || domain(z); }
};

// (K alpha)(z) = int_0^1 sum_j gamma_j(x, t y) y^j dt.
double homotopy_K(const FiniteForm1& alpha, const Eigen::VectorXd& z, int nodes = 64);

// max over probes and pairs of |d_i a_j - d_j a_i| by central differences.
double closedness_defect(const FiniteForm1& alpha, const std::vector<Eigen::VectorXd>& probes, double step = 1e-5);

inline constexpr double kClosednessTol = 1e-8;

// Primitive g with dg = alpha and g(base_point) = 0, built by applying K to
// the y-block and recursing on the pullback to y = 0, peeling the remaining
// coordinates from the last one. Throws not_closed above kClosednessTol and
// outside_domain when a probed section does not contain its origin.
std::function<double(const Eigen::VectorXd&)> primitive_of_closed(const FiniteForm1& alpha,
                                                                  const Eigen::VectorXd& base_point,
                                                                  const std::vector<Eigen::VectorXd>& probe_grid,
                                                                  int nodes = 64);

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& z,
                            double step = 1e-5);

// Var(f;U) <= factor_x int_U Gamma_X f dm + factor_y int_U Gamma_Y f dm.
struct PoincareCertificate {
  double C1 = 0.0, C2 = 0.0, delta = 0.0, measure_of_U = 0.0;
  double factor_x = 0.0;  // 3 C1 / (delta m(U)^2)
  double factor_y = 0.0;  // 3 C2 / (delta m(U))
  double combined = 0.0;  // max of the two factors: bound against int_U (Gamma_X + Gamma_Y) dm
  double bound(double energy_x, double energy_y) const { return factor_x * energy_x + factor_y * energy_y; }
};
PoincareCertificate combine_poincare(double C1, double C2, double delta, double mU);

// Sum of c * prod z_i^{e_i}.
struct Polynomial {
  struct Term {
    double coeff = 0.0;
    std::vector<int> exps;
  };
  int dim = 0;
  std::vector<Term> terms;

  double operator()(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& z) const;
  int degree() const;
};
// n_terms monomials of total degree 1..max_degree, coefficients uniform in [-1,1].
Polynomial random_polynomial(int dim, int max_degree, int n_terms, RandomSource& rng);

// Product-space check on U = [-1,1]x[-1/2,1/2] u [-1/2,1/2]x[-1,1] under the
// standard Gaussian on R^2: sections are intervals, so C1 = C2 = 1 and
// delta = nu([-1/2,1/2]).
struct ToyPoincareRow {
  std::string name;
  double variance = 0.0;
  double bound = 0.0;
  double std_error = 0.0;  // of variance - bound
  bool passed = false;     // variance - bound <= 3 std_error
};
struct ToyPoincareReport {
  PoincareCertificate certificate;
  std::vector<ToyPoincareRow> rows;
  bool all_passed() const;
};
ToyPoincareReport toy_product_poincare(std::size_t n_samples, int n_functions, SeededStream stream);

struct TestFunction {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> f;
  Field grad;
};

struct PoincareRatio {
  std::string name;
  double variance = 0.0;
  double energy = 0.0;  // E|grad f|^2
  double ratio = 0.0;
  double std_error = 0.0;  // delta-method stderr of the ratio
  bool passed = false;     // ratio <= 1 + 3 std_error
};

struct PoincareReport {
  std::size_t accepted = 0;
  std::size_t proposals = 0;
  std::vector<PoincareRatio> rows;
  bool all_passed() const;
};

// Rejection-samples n_samples points of the standard Gaussian on R^dim
// conditioned on the convex domain and compares Var(f) against E|grad f|^2.
PoincareReport gaussian_convex_poincare_mc(int dim, const std::function<bool(const Eigen::VectorXd&)>& domain,
                                           const std::vector<TestFunction>& battery, std::size_t n_samples,
                                           SeededStream stream);

// F(l_1(w), ..., l_n(w)) with l_i(w) = <e_i, w>_H for a fixed H-frame.
struct CylindricalFunctional {
  std::vector<SampledPath> frame;
  std::function<double(const Eigen::VectorXd&)> F;
  Field gradF;

  Eigen::VectorXd coords(const SampledPath& w) const;
  double operator()(const SampledPath& w) const { return F(coords(w)); }
  SampledPath gradient(const SampledPath& w) const;  // Df(w) = sum dF/dl_i e_i, frame assumed H-orthonormal
};

struct HCurve {
  std::function<SampledPath(double)> at;
  std::function<SampledPath(double)> velocity;
};

struct StokesSides {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect() const;  // |lhs - rhs| / max(1, |lhs|)
};

// (f(w+h(1)) - f(w+h(0)), int_0^1 (Df(w+h(t)), h'(t))_H dt).
StokesSides stokes_line(const std::function<double(const SampledPath&)>& f,
                        const std::function<SampledPath(const SampledPath&)>& Df, const SampledPath& w,
                        const HCurve& curve, int n_quad = 32);

// beta(w) = sum_j b_j(l(w)) <e_j, .>_H on an H-orthonormal frame; jacobian(l)(i,j) = d b_j / d l_i.
struct FrameOneForm {
  std::vector<SampledPath> frame;
  Field b;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;

  Eigen::VectorXd coords(const SampledPath& w) const;
  double apply(const SampledPath& w, const SampledPath& v) const;
  double d_beta(const SampledPath& w, const SampledPath& u, const SampledPath& v) const;
};

struct HSurface {
  std::function<SampledPath(double, double)> at;
  std::function<SampledPath(double, double)> d_sigma;
  std::function<SampledPath(double, double)> d_tau;
};

// lhs: the tau-line integral of beta at sigma=1 minus the one at sigma=0;
// rhs: the double integral of d beta(d_sigma H, d_tau H).
StokesSides stokes_surface(const FrameOneForm& beta, const SampledPath& w, const HSurface& homotopy, int n_quad = 32);

}  // namespace roughloop
