#include "roughloop/loop_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "roughloop/derham.hpp"
#include "roughloop/gauss_sampler.hpp"

namespace roughloop {

namespace {

AlgVec node(const LieGroup& G, const SampledPath& p, std::size_t k) {
  double buf[3];
  for (int i = 0; i < p.dim(); ++i) buf[i] = p.at(k, i);
  return G.embed(buf);
}

void require_algebra_path(const LieGroup& G, const SampledPath& p, const char* who) {
  if (p.dim() != G.dim()) fail(ErrorCode::invalid_argument, std::string(who) + ": path dimension must equal the algebra dimension");
}

// Builds a dim x (n+1) path from algebra values.
class AlgebraPathBuilder {
 public:
  AlgebraPathBuilder(const LieGroup& G, int level)
      : G_(G), level_(level), n_(std::size_t{1} << level), vals_(static_cast<std::size_t>(G.dim()) * (n_ + 1), 0.0) {}
  void set(std::size_t k, const AlgVec& v) {
    double buf[3];
    G_.project(v, buf);
    for (int i = 0; i < G_.dim(); ++i) vals_[static_cast<std::size_t>(i) * (n_ + 1) + k] = buf[i];
  }
  SampledPath finish() { return SampledPath::from_values(G_.dim(), level_, std::move(vals_)); }

 private:
  const LieGroup& G_;
  int level_;
  std::size_t n_;
  std::vector<double> vals_;
};

// P_0 applied to cumulative sums: out_k = c_k - t_k c_n.
SampledPath p0_cumulative(const LieGroup& G, int level, const std::vector<AlgVec>& cells) {
  const std::size_t n = cells.size();
  std::vector<AlgVec> c(n + 1, AlgVec::Zero());
  for (std::size_t k = 0; k < n; ++k) c[k + 1] = c[k] + cells[k];
  AlgebraPathBuilder out(G, level);
  for (std::size_t k = 1; k < n; ++k) out.set(k, c[k] - (static_cast<double>(k) / static_cast<double>(n)) * c[n]);
  return out.finish();
}

}  // namespace

// ---------------------------------------------------------------- H0Frame

SampledPath H0Frame::mode(int dim, int k, int i, int level) {
  require(k >= 1 && i >= 0 && i < dim, ErrorCode::invalid_argument, "H0Frame::mode: bad mode index");
  const double kp = k * std::numbers::pi;
  const double half = 0.5 * kp / static_cast<double>(std::size_t{1} << level);
  const double scale = std::numbers::sqrt2 / kp * (half / std::sin(half));
  return SampledPath::from_function(dim, level, [&](double t, double* x) {
    for (int j = 0; j < dim; ++j) x[j] = 0.0;
    x[i] = scale * std::sin(kp * t);
  });
}

H0Frame::H0Frame(const LieGroup& G, int K, int level) : K_(K), level_(level), dim_(G.dim()) {
  require(K >= 1, ErrorCode::invalid_argument, "H0Frame: need at least one mode");
  require(2 * K < (1 << level), ErrorCode::invalid_argument, "H0Frame: level too coarse for the requested modes");
  for (int k = 1; k <= K; ++k)
    for (int i = 0; i < dim_; ++i) basis_.push_back(mode(dim_, k, i, level));
}

// ------------------------------------------------------------- bracket calculus

SampledPath bracket_path(const LieGroup& G, const SampledPath& h, const SampledPath& k) {
  require_same_shape(h, k, "bracket_path");
  require_algebra_path(G, h, "bracket_path");
  AlgebraPathBuilder out(G, h.level());
  for (std::size_t j = 0; j < h.size(); ++j) out.set(j, bracket(node(G, h, j), node(G, k, j)));
  return out.finish();
}

SampledPath connection(const LieGroup& G, const SampledPath& h, const SampledPath& k) {
  require_same_shape(h, k, "connection");
  require_algebra_path(G, h, "connection");
  std::vector<AlgVec> cells(h.cells());
  for (std::size_t j = 0; j < h.cells(); ++j) {
    const AlgVec hbar = 0.5 * (node(G, h, j) + node(G, h, j + 1));
    cells[j] = -bracket(hbar, node(G, k, j + 1) - node(G, k, j));
  }
  return p0_cumulative(G, h.level(), cells);
}

ConnectionDefects metric_compatibility_defect(const LieGroup& G, const SampledPath& h, const SampledPath& k,
                                              const SampledPath& l) {
  ConnectionDefects out;
  const SampledPath hk = connection(G, h, k);
  out.torsion = cm_norm(hk - connection(G, k, h) - bracket_path(G, k, h));
  out.metric = std::abs(cm_inner(hk, l) + cm_inner(k, connection(G, h, l)));
  return out;
}

LoopOneForm T_v(const LieGroup& G, const LoopOneForm& alpha, const Eigen::VectorXd& v) {
  require_algebra_path(G, alpha.path, "T_v");
  require(v.size() == G.dim(), ErrorCode::invalid_argument, "T_v: v must lie in the algebra");
  const AlgVec V = G.embed(v);
  const SampledPath& a = alpha.path;
  const double dt = a.step();
  std::vector<AlgVec> cells(a.cells());
  for (std::size_t j = 0; j < a.cells(); ++j)
    cells[j] = dt * bracket(0.5 * (node(G, a, j) + node(G, a, j + 1)), V);
  return {p0_cumulative(G, a.level(), cells)};
}

CasimirTerms casimir_terms(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h) {
  require_same_shape(alpha.path, h, "casimir_terms");
  require_algebra_path(G, h, "casimir_terms");
  const Eigen::MatrixXd C = G.casimir();
  const SampledPath& a = alpha.path;
  const double dt = a.step();
  const int d = G.dim();
  Eigen::VectorXd ca0(d), ca1(d), h0(d), h1(d);
  Eigen::VectorXd int_ca = Eigen::VectorXd::Zero(d), int_h = Eigen::VectorXd::Zero(d);
  CasimirTerms out;
  auto load = [&](std::size_t k, Eigen::VectorXd& ca, Eigen::VectorXd& hv) {
    Eigen::VectorXd av(d);
    for (int i = 0; i < d; ++i) {
      av(i) = a.at(k, i);
      hv(i) = h.at(k, i);
    }
    ca = C * av;
  };
  load(0, ca0, h0);
  for (std::size_t k = 0; k < a.cells(); ++k) {
    load(k + 1, ca1, h1);
    // exact integral of a product of two linear functions over the cell
    out.T2 += dt / 6.0 * (2.0 * ca0.dot(h0) + ca0.dot(h1) + ca1.dot(h0) + 2.0 * ca1.dot(h1));
    int_ca += 0.5 * dt * (ca0 + ca1);
    int_h += 0.5 * dt * (h0 + h1);
    ca0 = ca1;
    h0 = h1;
  }
  out.T3 = -int_ca.dot(int_h);
  return out;
}

double weitzenboeck_rhs(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h, const Eigen::VectorXd& b1,
                        const PairingTerm& laplacian_term) {
  const CasimirTerms c = casimir_terms(G, alpha, h);
  const double lap = laplacian_term ? laplacian_term(alpha, h) : 0.0;
  return lap + alpha.pair(h) + T_v(G, alpha, b1).pair(h) + c.T2 + c.T3;
}

WeitzenboeckSums weitzenboeck_sums(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h, int K) {
  require_same_shape(alpha.path, h, "weitzenboeck_sums");
  require_algebra_path(G, h, "weitzenboeck_sums");
  const H0Frame frame(G, K, h.level());
  const std::size_t n = h.cells();
  const double dt = h.step();
  std::vector<AlgVec> adot(n), hdot(n);
  for (std::size_t j = 0; j < n; ++j) {
    adot[j] = (node(G, alpha.path, j + 1) - node(G, alpha.path, j)) / dt;
    hdot[j] = (node(G, h, j + 1) - node(G, h, j)) / dt;
  }

  WeitzenboeckSums out;
  out.K = K;
  // S1: sum_i int <alpha', [e_i, [e_i, h'] - c_i]>, c_i = int [e_i, h'].
  for (const SampledPath& e : frame.basis()) {
    AlgVec c = AlgVec::Zero();
    for (std::size_t j = 0; j < n; ++j) c += dt * bracket(0.5 * (node(G, e, j) + node(G, e, j + 1)), hdot[j]);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const AlgVec e0 = node(G, e, j), e1 = node(G, e, j + 1), em = 0.5 * (e0 + e1);
      // Simpson is exact for the quadratic dependence on the linear e(t)
      const double quad = (adot[j].dot(bracket(e0, bracket(e0, hdot[j]))) +
                           4.0 * adot[j].dot(bracket(em, bracket(em, hdot[j]))) +
                           adot[j].dot(bracket(e1, bracket(e1, hdot[j])))) / 6.0;
      acc += dt * (quad - adot[j].dot(bracket(em, c)));
    }
    out.S1 += acc;
  }
  // S2 over ordered pairs; [e_j,e_i] is antisymmetric, so twice the i<j sum halved.
  for (std::size_t i = 0; i < frame.size(); ++i)
    for (std::size_t j = i + 1; j < frame.size(); ++j) {
      const SampledPath br = bracket_path(G, frame[j], frame[i]);
      out.S2 += alpha.pair(br) * cm_inner(br, h);
    }
  return out;
}

double WeitzenboeckStudy::relative_error() const {
  if (sums.empty()) return 0.0;
  return std::abs(sums.back().total() - closed) / std::max(std::abs(closed), 1e-300);
}

bool WeitzenboeckStudy::cauchy() const {
  auto decreasing = [&](auto get) {
    double prev = INFINITY;
    for (std::size_t k = 1; k < sums.size(); ++k) {
      const double diff = std::abs(get(sums[k]) - get(sums[k - 1]));
      if (!(diff < prev)) return false;
      prev = diff;
    }
    return true;
  };
  return decreasing([](const WeitzenboeckSums& s) { return s.S1; }) &&
         decreasing([](const WeitzenboeckSums& s) { return s.S2; }) &&
         decreasing([](const WeitzenboeckSums& s) { return s.total(); });
}

WeitzenboeckStudy weitzenboeck_truncation(const LieGroup& G, const LoopOneForm& alpha, const SampledPath& h,
                                          const std::vector<int>& Ks) {
  WeitzenboeckStudy out;
  for (int K : Ks) out.sums.push_back(weitzenboeck_sums(G, alpha, h, K));
  const CasimirTerms c = casimir_terms(G, alpha, h);
  out.closed = c.T2 + c.T3;
  return out;
}

// -------------------------------------------------------------- IBP on loops

double tube_density_rho(double epsilon, double b_norm) {
  const QuadratureRule& q = gauss_legendre(32);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double r = epsilon * q.nodes[k];
    const double J = r < 1e-4 ? 1.0 - r * r / 12.0 : 2.0 * (1.0 - std::cos(r)) / (r * r);
    const double x = r * b_norm;
    const double shc = x < 1e-4 ? 1.0 + x * x / 6.0 : std::sinh(x) / x;
    acc += q.weights[k] * epsilon * r * r * J * std::exp(-0.5 * r * r) * shc;
  }
  return 4.0 * std::numbers::pi * acc;
}

namespace {

struct IbpSample {
  double lhs = 0.0, rhs = 0.0, weight = 1.0;
};

std::size_t time_index(double t, std::size_t n) {
  const double x = t * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::llround(x));
  require(std::abs(x - static_cast<double>(k)) < 1e-9 && k <= n, ErrorCode::invalid_argument,
          "LoopFunctional times must be dyadic at the sampling level");
  return k;
}

// X_h F by central differences of tau -> F(exp(tau h) gamma).
double derivative_along(const LoopFunctional& F, const std::vector<GroupMat>& vals,
                        const std::vector<AlgVec>& hvals, double step) {
  std::vector<GroupMat> plus(vals.size()), minus(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    plus[i] = exp_alg(step * hvals[i]) * vals[i];
    minus[i] = exp_alg(-step * hvals[i]) * vals[i];
  }
  return (F.F(plus) - F.F(minus)) / (2.0 * step);
}

IbpSample evaluate(const LieGroup& G, const LoopFunctional& f, const LoopFunctional& g, const SampledPath& hl,
                   const SampledPath& loop_driver, double step) {
  const GroupPath X = solve_flow(G, GroupMat::Identity(), loop_driver);
  const std::size_t n = loop_driver.cells();
  const double dt = loop_driver.step();
  // (h, b) = sum <h'_k, Ad(X_k) dw_k>
  double hb = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const AlgVec hdot = (node(G, hl, k + 1) - node(G, hl, k)) / dt;
    const AlgVec dw = node(G, loop_driver, k + 1) - node(G, loop_driver, k);
    hb += hdot.dot(X[k] * dw);
  }
  auto gather = [&](const LoopFunctional& F, std::vector<GroupMat>& vals, std::vector<AlgVec>& hv) {
    for (double t : F.times) {
      const std::size_t k = time_index(t, n);
      vals.push_back(X[k]);
      hv.push_back(node(G, hl, k));
    }
  };
  std::vector<GroupMat> fv, gv;
  std::vector<AlgVec> fh, gh;
  gather(f, fv, fh);
  gather(g, gv, gh);
  const double fval = f.F(fv), gval = g.F(gv);
  IbpSample s;
  s.lhs = derivative_along(f, fv, fh, step) * gval;
  s.rhs = fval * (-derivative_along(g, gv, gh, step) + hb * gval);
  return s;
}

// Self-normalized weighted mean with delta-method stderr.
EstimateCI weighted_estimate(const std::vector<double>& x, const std::vector<double>& w) {
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
  }
  const double m = swx / sw;
  const double wbar = sw / static_cast<double>(x.size());
  std::vector<double> psi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) psi[i] = w[i] * (x[i] - m) / wbar;
  EstimateCI e = mean_estimate(psi);
  e.mean = m;
  e.lo = m - 1.959963984540054 * e.std_error;
  e.hi = m + 1.959963984540054 * e.std_error;
  e.method = "weighted";
  return e;
}

}  // namespace

IbpReport ibp_mc_check(const LieGroup& G, const LoopFunctional& f, const LoopFunctional& g, const SampledPath& h,
                       const TubeSpec& tube, const IbpSettings& st, SeededStream stream) {
  require_algebra_path(G, h, "ibp_mc_check");
  require(st.n_samples >= 2, ErrorCode::invalid_argument, "ibp_mc_check: need at least two samples");
  const bool bridge = G.kind() == GroupKind::torus;
  const int out_level = bridge ? st.level : std::max(st.level, tube.resolve_level);
  require(h.level() <= out_level, ErrorCode::invalid_argument, "ibp_mc_check: h is finer than the loop samples");
  const SampledPath hl = h.upsample(out_level);
  const std::size_t N = st.n_samples;

  IbpReport rep;
  rep.sampler = bridge ? "bridge" : "tube";
  std::vector<IbpSample> samples(N);
  std::vector<std::size_t> tries(N, 0);
  parallel_for(N, st.workers, [&](std::size_t i) {
    const SeededStream sub = stream.substream(i);
    if (bridge) {
      // w - t w(1): the driver of the pinned loop (winding sectors of
      // weight exp(-2 pi^2) are neglected)
      const SampledPath w = sample_brownian(G.dim(), st.level, sub);
      const SampledPath line = SampledPath::linear(st.level, w.point(w.cells()));
      samples[i] = evaluate(G, f, g, hl, w - line, st.fd_step);
      tries[i] = 1;
      return;
    }
    for (std::uint64_t attempt = 0;; ++attempt) {
      const SampledPath w = sample_brownian(G.dim(), st.level, sub.substream(attempt));
      if (member_tube(G, tube, w) != Verdict::inside) continue;
      const Retraction r = retract(G, tube, w);
      samples[i] = evaluate(G, f, g, hl, r.path, st.fd_step);
      samples[i].weight = 1.0 / tube_density_rho(tube.epsilon, b_one(G, r.path).norm());
      tries[i] = attempt + 1;
      return;
    }
  });

  std::vector<double> L(N), R(N), D(N), W(N);
  for (std::size_t i = 0; i < N; ++i) {
    L[i] = samples[i].lhs;
    R[i] = samples[i].rhs;
    D[i] = L[i] - R[i];
    W[i] = samples[i].weight;
    rep.proposals += tries[i];
  }
  rep.accepted = N;
  if (bridge) {
    rep.lhs = mean_estimate(L);
    rep.rhs = mean_estimate(R);
    rep.defect = mean_estimate(D);
  } else {
    rep.lhs = weighted_estimate(L, W);
    rep.rhs = weighted_estimate(R, W);
    rep.defect = weighted_estimate(D, W);
    rep.raw_defect = mean_estimate(D);
    // paired: raw minus reweighted defect, per-sample influence
    const double wbar = std::accumulate(W.begin(), W.end(), 0.0) / static_cast<double>(N);
    std::vector<double> diff(N);
    for (std::size_t i = 0; i < N; ++i)
      diff[i] = (D[i] - rep.raw_defect.mean) - W[i] * (D[i] - rep.defect.mean) / wbar;
    rep.bias = mean_estimate(diff);
    rep.bias.mean = rep.raw_defect.mean - rep.defect.mean;
    rep.bias.lo = rep.bias.mean - 1.959963984540054 * rep.bias.std_error;
    rep.bias.hi = rep.bias.mean + 1.959963984540054 * rep.bias.std_error;
  }
  rep.within_3sigma = std::abs(rep.defect.mean) <= 3.0 * rep.defect.std_error;
  return rep;
}

}  // namespace roughloop
