#include "roughloop/wiener_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "roughloop/gauss_sampler.hpp"

namespace roughloop {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::inside:
      return "inside";
    case Verdict::outside:
      return "outside";
    case Verdict::boundary:
      return "boundary";
  }
  return "?";
}

Verdict classify(const std::vector<double>& values, double bound) {
  bool band = false;
  for (double v : values) {
    if (std::abs(v - bound) <= kBoundaryBand * std::abs(bound)) {
      band = true;
    } else if (v > bound) {
      return Verdict::outside;
    }
  }
  return band ? Verdict::boundary : Verdict::inside;
}

std::vector<double> ball_constraint_values(const BallSpec& ball, const SampledPath& w) {
  require_same_shape(ball.center, w, "member_U");
  const BesovParams& p = ball.params;
  const SampledPath& phi = ball.center;
  const SampledPath x = ball.kind == BallKind::anchored ? w - phi : w;
  const int d = w.dim();
  const int M = w.level();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(3 * d * (d + 1) / 2));
  for (int i = 0; i < d; ++i) out.push_back(path_besov_norm(x.component_path(i), p.m, p.theta_prime / 2.0));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      out.push_back(besov_norm(SimplexGrid::area(x.component(j), x.component(k), M), p.m, p.theta));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      out.push_back(besov_norm(SimplexGrid::area(phi.component(i), x.component(j), M), p.m, p.theta));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      out.push_back(besov_norm(SimplexGrid::area(x.component(i), phi.component(j), M), p.m, p.theta));
  return out;
}

Verdict member_U(const BallSpec& ball, const SampledPath& w) {
  require(ball.r > 0.0, ErrorCode::invalid_argument, "member_U: radius must be positive");
  return classify(ball_constraint_values(ball, w), ball.r);
}

Verdict member_V(const Level2Lift& z, double r, const Level2Lift& w, const BesovParams& p) {
  require(r >= 0.0, ErrorCode::invalid_argument, "member_V: radius must be nonnegative");
  const double dist = omega_distance(w, z, p);
  if (r == 0.0) return dist == 0.0 ? Verdict::boundary : Verdict::outside;
  return classify({dist}, r);
}

double pin_distance(const LieGroup& G, const SampledPath& w) {
  const GroupPath X = solve_flow(G, GroupMat::Identity(), w);
  return group_distance(X.values.back(), GroupMat::Identity()).value;
}

Verdict member_tube(const LieGroup& G, const TubeSpec& tube, const SampledPath& w) {
  require(tube.epsilon > 0.0 && tube.epsilon < 3.14159, ErrorCode::invalid_argument,
          "tube radius must lie in (0, pi)");
  return classify({pin_distance(G, w)}, tube.epsilon);
}

Retraction retract(const LieGroup& G, const TubeSpec& tube, const SampledPath& w) {
  const GroupPath X = solve_flow(G, GroupMat::Identity(), w);
  const GroupMat a = X.values.back();
  if (classify({group_distance(a, GroupMat::Identity()).value}, tube.epsilon) == Verdict::outside)
    fail(ErrorCode::outside_domain, "retract: path is outside the tube");
  const int L = std::max(w.level(), tube.resolve_level);
  Retraction out;
  out.shift = retraction_shift(G, a, w, L);
  out.path = w.upsample(L) + out.shift;
  out.pin_distance = pin_distance(G, out.path);
  if (!(out.pin_distance < tube.pin_tol))
    fail(ErrorCode::invalid_argument, "retract: pin tolerance missed; raise TubeSpec::resolve_level");
  return out;
}

double quasi_invariance_weight(const LieGroup& G, const GroupMat& a, const SampledPath& w) {
  const Eigen::VectorXd la = G.project(log_grp(a));
  const Eigen::VectorXd b = b_one(G, w);
  return std::exp(-la.dot(b) - 0.5 * la.squaredNorm());
}

std::vector<QuasiInvarianceRow> quasi_invariance_mc(const LieGroup& G, const GroupMat& a,
                                                    const std::vector<PathFunctional>& functionals, int level,
                                                    std::size_t n_samples, SeededStream stream, int workers,
                                                    int oversample) {
  require(n_samples >= 2 && oversample >= 0, ErrorCode::invalid_argument, "quasi_invariance_mc: bad sample settings");
  const std::size_t nf = functionals.size();
  std::vector<double> lhs(n_samples * nf), rhs(n_samples * nf);
  const int L = level + oversample;
  parallel_for(n_samples, workers, [&](std::size_t s) {
    const SampledPath w = sample_brownian(G.dim(), level, stream.substream(s));
    const SampledPath wl = w.upsample(L);
    const SampledPath shifted = wl + retraction_shift(G, a, w, L);
    const double weight = quasi_invariance_weight(G, a, w);
    for (std::size_t k = 0; k < nf; ++k) {
      lhs[s * nf + k] = functionals[k].F(shifted);
      rhs[s * nf + k] = functionals[k].F(wl) * weight;
    }
  });
  std::vector<QuasiInvarianceRow> out;
  for (std::size_t k = 0; k < nf; ++k) {
    std::vector<double> l(n_samples), r(n_samples), d(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
      l[s] = lhs[s * nf + k];
      r[s] = rhs[s * nf + k];
      d[s] = l[s] - r[s];
    }
    QuasiInvarianceRow row{functionals[k].name, mean_estimate(l), mean_estimate(r), mean_estimate(d)};
    row.within_3sigma = std::abs(row.defect.mean) <= 3.0 * row.defect.std_error;
    out.push_back(row);
  }
  return out;
}

double covering_kappa(double eps, int n, int K, double R, const std::function<double(double)>& F) {
  require(eps > 0.0 && n >= 1 && K >= 0 && R > 0.0, ErrorCode::invalid_argument,
          "covering_kappa: need eps > 0, n >= 1, K >= 0, R > 0");
  const double f = F(K + 18.0 * R * (K + 1));
  require(std::isfinite(f) && f > 0.0, ErrorCode::invalid_argument, "covering_kappa: modulus must be positive");
  const double bound = std::min(eps / (48.0 * n * R * (K + 1) * f), 0.5);
  return std::nextafter(bound, 0.0);  // the bound is exclusive
}

EmpiricalModulus fit_empirical_modulus(const LieGroup& G, int level, int n_probes, SeededStream stream,
                                       const BesovParams& p) {
  require(n_probes >= 1, ErrorCode::invalid_argument, "fit_empirical_modulus: need at least one probe");
  EmpiricalModulus out;
  for (int i = 0; i < n_probes; ++i) {
    const SeededStream sub = stream.substream(static_cast<std::uint64_t>(i));
    const double amp = 0.25 * static_cast<double>(1 << (i % 4));
    const SampledPath w = amp * sample_brownian(G.dim(), level, sub.substream(0));
    const SampledPath z = w + (0.05 * amp) * sample_brownian(G.dim(), level, sub.substream(1));
    const ContinuityProbe probe = flow_continuity_probe(G, w, z, p);
    if (!(probe.omega > 0.0)) continue;
    double size = besov_norm(lift(w).area, p.m, p.theta);
    double inc = 0.0;
    for (int c = 0; c < w.dim(); ++c) inc = std::max(inc, path_besov_norm(w.component_path(c), p.m, p.theta / 2.0));
    size += inc;
    out.slope = std::max(out.slope, probe.flow_distance / probe.omega / (1.0 + size));
    ++out.probes;
  }
  return out;
}

InclusionReport inclusion_check(const SampledPath& phi1, const SampledPath& phi2, double r, double delta,
                                int n_probes, SeededStream stream, const BesovParams& p, double R_est,
                                int workers) {
  require_same_shape(phi1, phi2, "inclusion_check");
  require(r > 0.0 && delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument, "inclusion_check: need r > 0, 0 < delta < 1");
  const int d = phi1.dim();
  InclusionReport rep;
  double phi_norm = 0.0;
  for (int i = 0; i < d; ++i) {
    rep.lhs = std::max(rep.lhs, cm_norm(phi1.component_path(i) - phi2.component_path(i)));
    phi_norm = std::max(phi_norm, path_besov_norm(phi1.component_path(i), p.m, p.theta / 2.0));
  }
  rep.threshold = delta * r / (1.0 + 3.0 * r + 2.0 * phi_norm);
  rep.hypothesis_holds = rep.lhs <= rep.threshold;
  if (r < 1.0) rep.v_radius = R_est * (5.0 + 6.0 * phi_norm) * r;
  if (!rep.hypothesis_holds) return rep;

  const BallSpec source{phi1, r, p, BallKind::anchored};
  const BallSpec target{phi2, (1.0 + delta) * r, p, BallKind::anchored};
  auto candidate = [&](double s, SeededStream st) { return phi1 + s * sample_brownian(d, phi1.level(), st); };

  // Scale search on pilot batches.
  std::uint64_t next_stream = 0;
  double s = 1.0;
  for (int round = 0; round < 40; ++round) {
    std::vector<int> ok(64, 0);
    const std::uint64_t base = next_stream;
    parallel_for(ok.size(), workers, [&](std::size_t i) {
      ok[i] = member_U(source, candidate(s, stream.substream(base + i))) == Verdict::inside;
    });
    next_stream += ok.size();
    int hits = 0;
    for (int v : ok) hits += v;
    if (hits * 4 >= static_cast<int>(ok.size())) break;
    s *= 0.5;
  }
  rep.scale = s;

  const Level2Lift phi_lift = lift(phi1);
  std::size_t attempts = 0;
  const std::size_t batch = 64;
  while (rep.probes < static_cast<std::size_t>(n_probes)) {
    struct Outcome {
      Verdict src = Verdict::outside;
      Verdict tgt = Verdict::outside;
      Verdict vball = Verdict::inside;
    };
    std::vector<Outcome> res(batch);
    std::vector<SampledPath> paths(batch);
    const std::uint64_t base = next_stream;
    parallel_for(batch, workers, [&](std::size_t i) {
      paths[i] = candidate(s, stream.substream(base + i));
      res[i].src = member_U(source, paths[i]);
      if (res[i].src != Verdict::inside) return;
      res[i].tgt = member_U(target, paths[i]);
      if (rep.v_radius > 0.0) res[i].vball = member_V(phi_lift, rep.v_radius, lift(paths[i]), p);
    });
    next_stream += batch;
    for (std::size_t i = 0; i < batch && rep.probes < static_cast<std::size_t>(n_probes); ++i) {
      ++attempts;
      if (res[i].src == Verdict::boundary) {
        ++rep.boundary_discarded;
        continue;
      }
      if (res[i].src != Verdict::inside) continue;
      ++rep.probes;
      if (res[i].tgt == Verdict::outside) {
        ++rep.counterexamples_U;
        if (!rep.first_counterexample) rep.first_counterexample = paths[i];
      }
      if (res[i].vball == Verdict::outside) ++rep.counterexamples_V;
    }
    if (attempts > 1000u * static_cast<std::size_t>(n_probes) + 10000u)
      fail(ErrorCode::invalid_argument, "inclusion_check: member sampler stalled");
  }
  rep.acceptance_rate = static_cast<double>(rep.probes + rep.boundary_discarded) / static_cast<double>(attempts);
  return rep;
}

}  // namespace roughloop
