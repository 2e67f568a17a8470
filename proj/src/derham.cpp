#include "roughloop/derham.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "roughloop/error.hpp"

namespace roughloop {

const QuadratureRule& gauss_legendre(int n) {
  require(n >= 1 && n <= 512, ErrorCode::invalid_argument, "gauss_legendre: node count must be in [1,512]");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot) return *slot;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  auto rule = std::make_unique<QuadratureRule>();
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule->nodes.push_back(0.5 * (es.eigenvalues()(i) + 1.0));
    rule->weights.push_back(v0 * v0);  // 2 v0^2 on [-1,1], halved for [0,1]
  }
  slot = std::move(rule);
  return *slot;
}

namespace {

void require_inside(const FiniteForm1& alpha, const Eigen::VectorXd& z) {
  require(z.size() == alpha.dim(), ErrorCode::invalid_argument, "point dimension does not match the form");
  if (!alpha.contains(z)) fail(ErrorCode::outside_domain, "point lies outside the domain of the form");
}

// s*alpha: the x-block of alpha restricted to y = 0, split as (n-1, 1).
FiniteForm1 pull_back_to_x(const FiniteForm1& alpha) {
  FiniteForm1 out;
  out.n = alpha.n - 1;
  out.m = 1;
  const int n = alpha.n, m = alpha.m;
  const Field coeffs = alpha.coeffs;
  out.coeffs = [coeffs, n, m](const Eigen::VectorXd& x) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n + m);
    z.head(n) = x;
    return Eigen::VectorXd(coeffs(z).head(n));
  };
  if (alpha.domain) {
    const auto dom = alpha.domain;
    out.domain = [dom, n, m](const Eigen::VectorXd& x) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n + m);
      z.head(n) = x;
      return dom(z);
    };
  }
  return out;
}

void check_sections(const FiniteForm1& alpha, const std::vector<Eigen::VectorXd>& probes) {
  for (const auto& z : probes) {
    Eigen::VectorXd s = z;
    for (double t : {0.0, 0.25, 0.5, 0.75}) {
      s.tail(alpha.m) = t * z.tail(alpha.m);
      if (!alpha.contains(s)) fail(ErrorCode::outside_domain, "primitive_of_closed: a y-section is not star-shaped around 0");
    }
  }
}

}  // namespace

double homotopy_K(const FiniteForm1& alpha, const Eigen::VectorXd& z, int nodes) {
  require_inside(alpha, z);
  if (alpha.m == 0) return 0.0;
  const QuadratureRule& q = gauss_legendre(nodes);
  const Eigen::VectorXd y = z.tail(alpha.m);
  Eigen::VectorXd s = z;
  double acc = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    s.tail(alpha.m) = q.nodes[k] * y;
    acc += q.weights[k] * alpha.coeffs(s).tail(alpha.m).dot(y);
  }
  return acc;
}

double closedness_defect(const FiniteForm1& alpha, const std::vector<Eigen::VectorXd>& probes, double step) {
  const int D = alpha.dim();
  double worst = 0.0;
  for (const auto& z : probes) {
    require_inside(alpha, z);
    Eigen::MatrixXd Jac(D, D);  // Jac(i, j) = d a_j / d z_i
    for (int i = 0; i < D; ++i) {
      Eigen::VectorXd zp = z, zm = z;
      zp(i) += step;
      zm(i) -= step;
      Jac.row(i) = (alpha.coeffs(zp) - alpha.coeffs(zm)).transpose() / (2.0 * step);
    }
    worst = std::max(worst, (Jac - Jac.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::function<double(const Eigen::VectorXd&)> primitive_of_closed(const FiniteForm1& alpha,
                                                                  const Eigen::VectorXd& base_point,
                                                                  const std::vector<Eigen::VectorXd>& probe_grid,
                                                                  int nodes) {
  require(alpha.n >= 0 && alpha.m >= 0 && alpha.dim() >= 1, ErrorCode::invalid_argument,
          "primitive_of_closed: empty form");
  require(alpha.m >= 1 || alpha.n >= 1, ErrorCode::invalid_argument, "primitive_of_closed: empty split");
  if (closedness_defect(alpha, probe_grid) >= kClosednessTol)
    fail(ErrorCode::not_closed, "primitive_of_closed: finite-difference curl exceeds 1e-8");
  require_inside(alpha, base_point);

  // Chain of forms: level 0 is alpha, each next one is the pullback of the
  // previous x-block to y = 0.
  std::vector<FiniteForm1> chain{alpha};
  if (chain.back().m == 0) {
    FiniteForm1 f = alpha;
    f.n = alpha.n - 1;
    f.m = 1;
    chain.back() = f;
  }
  std::vector<Eigen::VectorXd> probes = probe_grid;
  probes.push_back(base_point);
  check_sections(chain.back(), probes);
  while (chain.back().n > 0) {
    const int n = chain.back().n;
    chain.push_back(pull_back_to_x(chain.back()));
    for (auto& z : probes) z = Eigen::VectorXd(z.head(n));
    check_sections(chain.back(), probes);
  }

  auto raw = [chain, nodes](const Eigen::VectorXd& z) {
    double g = 0.0;
    Eigen::VectorXd x = z;
    for (const auto& f : chain) {
      g += homotopy_K(f, x, nodes);
      x = Eigen::VectorXd(x.head(f.n));
    }
    return g;
  };
  const double offset = raw(base_point);
  return [raw, offset](const Eigen::VectorXd& z) { return raw(z) - offset; };
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& z,
                            double step) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Eigen::VectorXd zp = z, zm = z;
    zp(i) += step;
    zm(i) -= step;
    out(i) = (g(zp) - g(zm)) / (2.0 * step);
  }
  return out;
}

// ------------------------------------------------------------------ Poincare

PoincareCertificate combine_poincare(double C1, double C2, double delta, double mU) {
  require(C1 > 0.0 && C2 > 0.0 && delta > 0.0 && mU > 0.0, ErrorCode::invalid_argument,
          "combine_poincare: all inputs must be positive");
  require(delta <= 1.0 && mU <= 1.0, ErrorCode::invalid_argument, "combine_poincare: delta and m(U) are probabilities");
  PoincareCertificate c{C1, C2, delta, mU};
  c.factor_x = 3.0 * C1 / (delta * mU * mU);
  c.factor_y = 3.0 * C2 / (delta * mU);
  c.combined = std::max(c.factor_x, c.factor_y);
  return c;
}

double Polynomial::operator()(const Eigen::VectorXd& z) const {
  double acc = 0.0;
  for (const auto& t : terms) {
    double v = t.coeff;
    for (int i = 0; i < dim; ++i) v *= std::pow(z(i), t.exps[static_cast<std::size_t>(i)]);
    acc += v;
  }
  return acc;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  for (const auto& t : terms)
    for (int i = 0; i < dim; ++i) {
      const int e = t.exps[static_cast<std::size_t>(i)];
      if (e == 0) continue;
      double v = t.coeff * e * std::pow(z(i), e - 1);
      for (int j = 0; j < dim; ++j)
        if (j != i) v *= std::pow(z(j), t.exps[static_cast<std::size_t>(j)]);
      g(i) += v;
    }
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& t : terms)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        std::vector<int> e = t.exps;
        double c = t.coeff;
        c *= e[static_cast<std::size_t>(i)]--;
        c *= e[static_cast<std::size_t>(j)]--;
        if (c == 0.0) continue;
        for (int k = 0; k < dim; ++k) c *= std::pow(z(k), e[static_cast<std::size_t>(k)]);
        H(i, j) += c;
      }
  return H;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, std::accumulate(t.exps.begin(), t.exps.end(), 0));
  return d;
}

Polynomial random_polynomial(int dim, int max_degree, int n_terms, RandomSource& rng) {
  require(dim >= 1 && max_degree >= 1 && n_terms >= 1, ErrorCode::invalid_argument, "random_polynomial: bad shape");
  Polynomial p{dim, {}};
  for (int k = 0; k < n_terms; ++k) {
    Polynomial::Term t{2.0 * rng.uniform() - 1.0, std::vector<int>(static_cast<std::size_t>(dim), 0)};
    const int deg = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_degree)));
    for (int j = 0; j < deg; ++j) ++t.exps[rng.below(static_cast<std::uint64_t>(dim))];
    p.terms.push_back(t);
  }
  return p;
}

bool ToyPoincareReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ToyPoincareRow& r) { return r.passed; });
}

ToyPoincareReport toy_product_poincare(std::size_t n_samples, int n_functions, SeededStream stream) {
  require(n_samples >= 2 && n_functions >= 1, ErrorCode::invalid_argument, "toy_product_poincare: bad sizes");
  auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  const double nu_big = Phi(1.0) - Phi(-1.0), nu_small = Phi(0.5) - Phi(-0.5);
  const double mU = 2.0 * nu_big * nu_small - nu_small * nu_small;
  auto inside = [](double x, double y) {
    return (std::abs(x) <= 1.0 && std::abs(y) <= 0.5) || (std::abs(x) <= 0.5 && std::abs(y) <= 1.0);
  };
  ToyPoincareReport rep;
  rep.certificate = combine_poincare(1.0, 1.0, nu_small, mU);

  RandomSource rng(stream);
  std::vector<Eigen::Vector2d> pts;
  while (pts.size() < n_samples) {
    const double x = rng.normal(), y = rng.normal();
    if (inside(x, y)) pts.emplace_back(x, y);
  }
  RandomSource coeffs(stream.substream(1));
  const double n = static_cast<double>(pts.size());
  for (int k = 0; k < n_functions; ++k) {
    const Polynomial P = random_polynomial(2, 3, 4, coeffs);
    std::vector<double> f(pts.size()), gx(pts.size()), gy(pts.size());
    double fbar = 0.0, gxbar = 0.0, gybar = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Eigen::VectorXd z = pts[i];
      const Eigen::VectorXd g = P.gradient(z);
      f[i] = P(z);
      gx[i] = g(0) * g(0);
      gy[i] = g(1) * g(1);
      fbar += f[i];
      gxbar += gx[i];
      gybar += gy[i];
    }
    fbar /= n;
    gxbar /= n;
    gybar /= n;
    double var = 0.0;
    for (double v : f) var += (v - fbar) * (v - fbar);
    var /= n;
    // int_U Gamma dm = m(U) E_U[Gamma]
    const double ax = rep.certificate.factor_x * mU, ay = rep.certificate.factor_y * mU;
    ToyPoincareRow row{"poly" + std::to_string(k), var, ax * gxbar + ay * gybar};
    std::vector<double> psi(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) psi[i] = (f[i] - fbar) * (f[i] - fbar) - ax * gx[i] - ay * gy[i];
    row.std_error = mean_estimate(psi).std_error;
    row.passed = row.variance - row.bound <= 3.0 * row.std_error;
    rep.rows.push_back(row);
  }
  return rep;
}

bool PoincareReport::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const PoincareRatio& r) { return r.passed; });
}

PoincareReport gaussian_convex_poincare_mc(int dim, const std::function<bool(const Eigen::VectorXd&)>& domain,
                                           const std::vector<TestFunction>& battery, std::size_t n_samples,
                                           SeededStream stream) {
  require(dim >= 1 && n_samples >= 2, ErrorCode::invalid_argument, "gaussian_convex_poincare_mc: need dim >= 1, n >= 2");
  RandomSource rng(stream);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(n_samples);
  PoincareReport rep;
  Eigen::VectorXd z(dim);
  while (pts.size() < n_samples) {
    for (int i = 0; i < dim; ++i) z(i) = rng.normal();
    ++rep.proposals;
    if (rep.proposals > 1000 * n_samples + 100000)
      fail(ErrorCode::invalid_argument, "gaussian_convex_poincare_mc: domain has negligible Gaussian mass");
    if (!domain || domain(z)) pts.push_back(z);
  }
  rep.accepted = pts.size();
  const double n = static_cast<double>(pts.size());

  for (const auto& tf : battery) {
    std::vector<double> f(pts.size()), e(pts.size());
    double fbar = 0.0, ebar = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      f[i] = tf.f(pts[i]);
      e[i] = tf.grad(pts[i]).squaredNorm();
      fbar += f[i];
      ebar += e[i];
    }
    fbar /= n;
    ebar /= n;
    double var = 0.0;
    for (double v : f) var += (v - fbar) * (v - fbar);
    var /= n;
    PoincareRatio row{tf.name, var, ebar};
    if (ebar > 0.0) {
      row.ratio = var / ebar;
      // influence function of V/E
      double ss = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double psi = ((f[i] - fbar) * (f[i] - fbar) - var) / ebar - var * (e[i] - ebar) / (ebar * ebar);
        ss += psi * psi;
      }
      row.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    row.passed = row.ratio <= 1.0 + 3.0 * row.std_error;
    rep.rows.push_back(row);
  }
  return rep;
}

// -------------------------------------------------------------------- Stokes

Eigen::VectorXd CylindricalFunctional::coords(const SampledPath& w) const {
  Eigen::VectorXd l(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i) l(static_cast<Eigen::Index>(i)) = cm_inner(frame[i], w);
  return l;
}

SampledPath CylindricalFunctional::gradient(const SampledPath& w) const {
  const Eigen::VectorXd g = gradF(coords(w));
  SampledPath out(w.dim(), w.level());
  for (std::size_t i = 0; i < frame.size(); ++i) out = out + g(static_cast<Eigen::Index>(i)) * frame[i];
  return out;
}

double StokesSides::defect() const { return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)); }

StokesSides stokes_line(const std::function<double(const SampledPath&)>& f,
                        const std::function<SampledPath(const SampledPath&)>& Df, const SampledPath& w,
                        const HCurve& curve, int n_quad) {
  const QuadratureRule& q = gauss_legendre(n_quad);
  StokesSides s;
  s.lhs = f(w + curve.at(1.0)) - f(w + curve.at(0.0));
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double t = q.nodes[k];
    s.rhs += q.weights[k] * cm_inner(Df(w + curve.at(t)), curve.velocity(t));
  }
  return s;
}

Eigen::VectorXd FrameOneForm::coords(const SampledPath& w) const {
  Eigen::VectorXd l(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i) l(static_cast<Eigen::Index>(i)) = cm_inner(frame[i], w);
  return l;
}

double FrameOneForm::apply(const SampledPath& w, const SampledPath& v) const { return b(coords(w)).dot(coords(v)); }

double FrameOneForm::d_beta(const SampledPath& w, const SampledPath& u, const SampledPath& v) const {
  const Eigen::MatrixXd J = jacobian(coords(w));
  return coords(u).dot((J - J.transpose()) * coords(v));
}

StokesSides stokes_surface(const FrameOneForm& beta, const SampledPath& w, const HSurface& H, int n_quad) {
  const QuadratureRule& q = gauss_legendre(n_quad);
  StokesSides s;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double t = q.nodes[k];
    s.lhs += q.weights[k] * (beta.apply(w + H.at(1.0, t), H.d_tau(1.0, t)) - beta.apply(w + H.at(0.0, t), H.d_tau(0.0, t)));
  }
  for (std::size_t a = 0; a < q.nodes.size(); ++a)
    for (std::size_t b = 0; b < q.nodes.size(); ++b) {
      const double sg = q.nodes[a], t = q.nodes[b];
      s.rhs += q.weights[a] * q.weights[b] * beta.d_beta(w + H.at(sg, t), H.d_sigma(sg, t), H.d_tau(sg, t));
    }
  return s;
}

}  // namespace roughloop
