#include "roughloop/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "roughloop/error.hpp"
#include "roughloop/gauss_sampler.hpp"
#include "roughloop/group_flows.hpp"

namespace roughloop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(const std::string& s) {
  double x = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x)) return std::nullopt;
  return x;
}

std::optional<long long> parse_int(const std::string& s) {
  long long x = 0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return x;
}

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(item);
  }
  return out;
}

enum class Kind { integer, real, int_list, real_list };

struct Param {
  ParamSpec spec;
  Kind kind;
  double lo;
  double hi;
};

struct Run;
using Runner = void (*)(Run&);
using Checker = void (*)(const ExperimentConfig&, int level, std::vector<std::string>&);

struct Entry {
  ExperimentInfo info;
  std::vector<Param> params;
  int min_level, max_level;
  int min_n_seeds;
  Runner run;
  Checker check;
};

const std::vector<Entry>& registry();

// Shared state for one experiment run.
struct Run {
  const ExperimentConfig& cfg;
  const Entry& entry;
  LieGroup G;
  int level;
  int n;
  int workers;
  SeededStream stream;
  RunResult result;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string raw(const std::string& key) const {
    auto it = cfg.params.find(key);
    if (it != cfg.params.end()) return it->second;
    for (const auto& p : entry.params)
      if (p.spec.key == key) return p.spec.default_value;
    fail(ErrorCode::config, "undeclared parameter " + key);
  }
  double real(const std::string& key) const { return *parse_double(raw(key)); }
  int integer(const std::string& key) const { return static_cast<int>(*parse_int(raw(key))); }
  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split_list(raw(key))) out.push_back(*parse_double(s));
    return out;
  }
  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    for (const auto& s : split_list(raw(key))) out.push_back(static_cast<int>(*parse_int(s)));
    return out;
  }

  // Point keys first, then the resolved experiment keys and the Besov parameters.
  std::string provenance(const std::vector<std::pair<std::string, std::string>>& point) const {
    std::string s;
    auto add = [&](const std::string& k, const std::string& v) {
      if (!s.empty()) s += ';';
      s += k + "=" + v;
    };
    for (const auto& [k, v] : point) add(k, v);
    for (const auto& p : entry.params) add(p.spec.key, raw(p.spec.key));
    add("n_seeds", std::to_string(n));
    add("m", std::to_string(cfg.besov.m));
    add("theta", shortest(cfg.besov.theta));
    add("theta_prime", shortest(cfg.besov.theta_prime));
    add("relaxed", cfg.besov.relaxed ? "1" : "0");
    return s;
  }

  void row(const std::vector<std::pair<std::string, std::string>>& point, const std::string& statistic, double value,
           double se, std::size_t count) {
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.rows.push_back({entry.info.name, G.name(), level, provenance(point), statistic, value, se, count,
                           cfg.seed, ms});
  }
  void row(const std::vector<std::pair<std::string, std::string>>& point, const std::string& statistic,
           const EstimateCI& e) {
    row(point, statistic, e.mean, e.std_error, e.n);
  }
  void check(bool ok, const std::string& what) {
    if (!ok) result.breaches.push_back(entry.info.name + ": " + what);
  }
};

using Point = std::vector<std::pair<std::string, std::string>>;

// ---------------------------------------------------------------------------

void run_dyadic_convergence(Run& r) {
  const int d = r.integer("dim");
  const int lo = r.integer("n_lo");
  const int hi = r.integer("n_hi");
  const ConvergenceTable t =
      convergence_experiment(d, r.level, lo, hi, r.cfg.besov, r.n, r.stream, r.workers, r.integer("n_boot"));
  for (const auto& row : t.rows) {
    for (int k = 0; k < kConvergenceStats; ++k) {
      const Point pt{{"N", std::to_string(row.N)}};
      r.row(pt, "median_" + kConvergenceStatNames[k], row.median[k], kNaN, row.mean[k].n);
      r.row(pt, "mean_" + kConvergenceStatNames[k], row.mean[k]);
    }
  }
  for (int k = 0; k < kConvergenceStats; ++k) {
    const SlopeFit& s = t.slope[k];
    const std::string& name = kConvergenceStatNames[k];
    const auto n = static_cast<std::size_t>(r.n);
    r.row({}, "slope_" + name, s.slope, kNaN, n);
    r.row({}, "slope_ci_lo_" + name, s.lo, kNaN, n);
    r.row({}, "slope_ci_hi_" + name, s.hi, kNaN, n);
    r.check(s.slope < 0.0 && s.hi < 0.0, "slope of " + name + " is not negative with CI excluding 0");
  }
}

void run_flow_identities(Run& r) {
  const int over = r.integer("oversample");
  const FlowInputs in = standard_flow_inputs(r.G, r.level);
  std::vector<FlowIdentityDefects> d(static_cast<std::size_t>(r.n));
  parallel_for(d.size(), r.workers, [&](std::size_t s) {
    const SampledPath w = sample_brownian(r.G.dim(), r.level, r.stream.substream(s));
    d[s] = flow_identity_defects(r.G, w, in.a, in.phi, in.h, over);
  });
  const bool abelian = r.G.kind() == GroupKind::torus;
  struct Stat {
    const char* name;
    double FlowIdentityDefects::*field;
    double tol;
  };
  const Stat stats[] = {{"left_translation", &FlowIdentityDefects::left_translation, abelian ? 1e-10 : 1e-12},
                        {"zeta_identity", &FlowIdentityDefects::zeta_identity, abelian ? 1e-10 : 1e-6},
                        {"Z_identity", &FlowIdentityDefects::Z_identity, abelian ? 1e-10 : 1e-6},
                        {"round_trip", &FlowIdentityDefects::round_trip, abelian ? 1e-10 : 1e-6}};
  for (const Stat& st : stats) {
    std::vector<double> xs;
    for (const auto& x : d) xs.push_back(x.*st.field);
    const double mx = *std::max_element(xs.begin(), xs.end());
    r.row({}, std::string("max_") + st.name, mx, kNaN, xs.size());
    r.row({}, std::string("median_") + st.name, median(xs), kNaN, xs.size());
    r.check(mx < st.tol, std::string(st.name) + " defect " + shortest(mx) + " above " + shortest(st.tol));
  }
}

void run_small_ball(Run& r) {
  const double eps = r.real("epsilon");
  const std::vector<int> Ns = r.integers("n_list");
  const SampledPath z = SampledPath::linear(r.level, {1.0});
  const auto cons = positivity_constraints({z}, eps, r.cfg.besov);
  std::vector<double> lower;
  for (int N : Ns) {
    const SmallBallResult res =
        small_ball_estimate(cons, N, r.n, r.stream.substream(static_cast<std::uint64_t>(N)), r.level, r.workers);
    const Point pt{{"N", std::to_string(N)}};
    r.row(pt, "acceptance", res.estimate.mean, kNaN, res.estimate.n);
    r.row(pt, "wilson_lo", res.estimate.lo, kNaN, res.estimate.n);
    r.row(pt, "wilson_hi", res.estimate.hi, kNaN, res.estimate.n);
    r.row(pt, "boundary_discarded", static_cast<double>(res.boundary), kNaN, static_cast<std::size_t>(r.n));
    r.check(res.estimate.lo > 0.0, "Wilson lower bound is zero at N=" + std::to_string(N));
    lower.push_back(res.estimate.lo);
  }
  if (lower.size() >= 2 && lower.front() > 0.0 && lower.back() > 0.0) {
    const double ratio = std::max(lower.front() / lower.back(), lower.back() / lower.front());
    r.row({}, "wilson_lo_ratio", ratio, kNaN, static_cast<std::size_t>(r.n));
    r.check(ratio <= 10.0, "Wilson lower bounds differ by more than a factor 10");
  }
}

void run_poincare_mc(Run& r) {
  const auto domains = standard_convex_domains();
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const ConvexDomain& D = domains[i];
    const PoincareReport rep = gaussian_convex_poincare_mc(D.dim, D.contains, standard_battery(D.dim),
                                                           static_cast<std::size_t>(r.n), r.stream.substream(i));
    const Point dp{{"domain", D.name}, {"dim", std::to_string(D.dim)}};
    r.row(dp, "acceptance", static_cast<double>(rep.accepted) / static_cast<double>(rep.proposals), kNaN,
          rep.proposals);
    for (const auto& row : rep.rows) {
      Point pt = dp;
      pt.emplace_back("function", row.name);
      r.row(pt, "variance", row.variance, kNaN, rep.accepted);
      r.row(pt, "energy", row.energy, kNaN, rep.accepted);
      r.row(pt, "ratio", row.ratio, row.std_error, rep.accepted);
      r.check(row.passed, "Var/Energy ratio above 1+3se for " + row.name + " on " + D.name);
    }
  }
  const ToyPoincareReport toy =
      toy_product_poincare(static_cast<std::size_t>(r.n), r.integer("toy_functions"), r.stream.substream(1000));
  const Point tp{{"domain", "product-toy"}};
  r.row(tp, "factor_x", toy.certificate.factor_x, kNaN, 0);
  r.row(tp, "factor_y", toy.certificate.factor_y, kNaN, 0);
  for (const auto& row : toy.rows) {
    Point pt = tp;
    pt.emplace_back("function", row.name);
    r.row(pt, "variance", row.variance, kNaN, static_cast<std::size_t>(r.n));
    r.row(pt, "bound", row.bound, row.std_error, static_cast<std::size_t>(r.n));
    r.check(row.passed, "product certificate exceeded for " + row.name);
  }
}

void run_inclusion_audit(Run& r) {
  const int d = r.integer("dim");
  const double radius = r.real("r");
  const double delta = r.real("delta");
  const BesovParams& p = r.cfg.besov;
  const SampledPath phi1 = SampledPath::from_function(d, r.level, [d](double t, double* x) {
    for (int i = 0; i < d; ++i) x[i] = 0.3 * std::sin(M_PI * (i + 1) * t) + 0.2 * i * t * t;
  });
  double phi_norm = 0.0;
  for (int i = 0; i < d; ++i) phi_norm = std::max(phi_norm, path_besov_norm(phi1.component_path(i), p.m, p.theta / 2.0));
  const double threshold = delta * radius / (1.0 + 3.0 * radius + 2.0 * phi_norm);
  // The perturbation t(1-t) in the first component has cm-norm 1/sqrt(3).
  const double c = 0.5 * threshold * std::sqrt(3.0);
  const SampledPath phi2 = phi1 + SampledPath::from_function(d, r.level, [c, d](double t, double* x) {
                                    for (int i = 0; i < d; ++i) x[i] = 0.0;
                                    x[0] = c * t * (1.0 - t);
                                  });
  std::vector<SampledPath> batch;
  for (int s = 0; s < r.integer("n_embedding"); ++s)
    batch.push_back(sample_brownian(d, r.level, r.stream.substream(1'000'000 + static_cast<std::uint64_t>(s))));
  const EmbeddingConstants ec = estimate_embedding_constants(batch, p);
  const InclusionReport rep = inclusion_check(phi1, phi2, radius, delta, r.n, r.stream, p, ec.R(), r.workers);
  const auto n = rep.probes;
  r.row({}, "embedding_R", ec.R(), kNaN, ec.samples);
  r.row({}, "cm_distance", rep.lhs, kNaN, 0);
  r.row({}, "threshold", rep.threshold, kNaN, 0);
  r.row({}, "sampler_scale", rep.scale, kNaN, 0);
  r.row({}, "acceptance", rep.acceptance_rate, kNaN, n);
  r.row({}, "boundary_discarded", static_cast<double>(rep.boundary_discarded), kNaN, n);
  r.row({}, "counterexamples_U", static_cast<double>(rep.counterexamples_U), kNaN, n);
  if (rep.v_radius > 0.0) {
    r.row({}, "v_radius", rep.v_radius, kNaN, 0);
    r.row({}, "counterexamples_V", static_cast<double>(rep.counterexamples_V), kNaN, n);
  }
  r.check(rep.hypothesis_holds, "perturbation exceeds the inclusion threshold");
  r.check(rep.counterexamples_U == 0, std::to_string(rep.counterexamples_U) + " U-ball counterexamples");
}

void run_stokes_audit(Run& r) {
  const int n_frame = r.integer("frame");
  const int degree = r.integer("degree");
  const int dim = r.G.dim();
  const H0Frame full(r.G, (n_frame + dim - 1) / dim, r.level);
  const std::vector<SampledPath> frame(full.basis().begin(), full.basis().begin() + n_frame);
  struct Out {
    double line = 0.0, surface = 0.0, boundary = 0.0;
  };
  std::vector<Out> out(static_cast<std::size_t>(r.n));
  parallel_for(out.size(), r.workers, [&](std::size_t s) {
    RandomSource rng(r.stream.substream(s));
    const Polynomial P = random_polynomial(n_frame, degree, 6, rng);
    auto combo = [&] {
      SampledPath v(dim, r.level);
      for (const auto& e : frame) v = v + rng.normal() * e;
      return v;
    };
    const SampledPath u = combo();
    const SampledPath v = combo();
    const SampledPath w = sample_brownian(dim, r.level, r.stream.substream(s + 1'000'000));
    const CylindricalFunctional f{frame, [P](const Eigen::VectorXd& l) { return P(l); },
                                  [P](const Eigen::VectorXd& l) { return P.gradient(l); }};
    const HCurve curve{[u, v](double t) { return t * u + (t * t) * v; },
                       [u, v](double t) { return u + (2.0 * t) * v; }};
    out[s].line = stokes_line([&](const SampledPath& x) { return f(x); },
                              [&](const SampledPath& x) { return f.gradient(x); }, w, curve)
                      .defect();
    const FrameOneForm beta{frame, [P](const Eigen::VectorXd& l) { return P.gradient(l); },
                            [P](const Eigen::VectorXd& l) { return P.hessian(l); }};
    const HSurface H{[u, v](double sg, double t) { return t * u + (sg * t * (1.0 - t)) * v; },
                     [v](double, double t) { return (t * (1.0 - t)) * v; },
                     [u, v](double sg, double t) { return u + (sg * (1.0 - 2.0 * t)) * v; }};
    const StokesSides sides = stokes_surface(beta, w, H);
    out[s].surface = sides.defect();
    out[s].boundary = std::abs(sides.lhs);
  });
  double line = 0.0, surf = 0.0, bnd = 0.0;
  for (const auto& o : out) {
    line = std::max(line, o.line);
    surf = std::max(surf, o.surface);
    bnd = std::max(bnd, o.boundary);
  }
  const auto n = out.size();
  r.row({{"version", "line"}}, "max_relative_defect", line, kNaN, n);
  r.row({{"version", "surface"}}, "max_relative_defect", surf, kNaN, n);
  r.row({{"version", "surface"}}, "max_boundary_difference", bnd, kNaN, n);
  r.check(line < 1e-8, "line Stokes defect " + shortest(line));
  r.check(bnd < 1e-8, "surface boundary difference " + shortest(bnd));
}

void run_retraction_audit(Run& r) {
  TubeSpec tube;
  tube.epsilon = r.real("epsilon");
  tube.resolve_level = r.level + r.integer("resolve_offset");
  struct Out {
    bool inside = false;
    double pin = 0.0, second = 0.0;
  };
  std::size_t accepted = 0, proposals = 0, pinned = 0;
  double worst_pin = 0.0, worst_move = 0.0;
  const std::size_t batch = 64;
  std::uint64_t next = 0;
  while (accepted < static_cast<std::size_t>(r.n)) {
    std::vector<Out> res(batch);
    const std::uint64_t base = next;
    parallel_for(batch, r.workers, [&](std::size_t i) {
      const SampledPath w = sample_brownian(r.G.dim(), r.level, r.stream.substream(base + i));
      if (member_tube(r.G, tube, w) != Verdict::inside) return;
      res[i].inside = true;
      const Retraction once = retract(r.G, tube, w);
      res[i].pin = once.pin_distance;
      res[i].second = cm_norm(retract(r.G, tube, once.path).shift);
    });
    next += batch;
    for (std::size_t i = 0; i < batch && accepted < static_cast<std::size_t>(r.n); ++i) {
      ++proposals;
      if (!res[i].inside) continue;
      ++accepted;
      if (res[i].pin < tube.pin_tol) ++pinned;
      worst_pin = std::max(worst_pin, res[i].pin);
      worst_move = std::max(worst_move, res[i].second);
    }
    if (proposals > 10'000'000u) fail(ErrorCode::invalid_argument, "retraction-audit: tube acceptance too small");
  }
  const Point pt{{"resolve_level", std::to_string(tube.resolve_level)}};
  r.row(pt, "acceptance", static_cast<double>(accepted) / static_cast<double>(proposals), kNaN, proposals);
  r.row(pt, "fraction_pinned", static_cast<double>(pinned) / static_cast<double>(accepted), kNaN, accepted);
  r.row(pt, "max_pin_distance", worst_pin, kNaN, accepted);
  r.row(pt, "max_second_retraction_move", worst_move, kNaN, accepted);
  r.check(pinned == accepted, "some retracted paths miss the pin tolerance");
  r.check(worst_move < 1e-6, "second retraction moved by " + shortest(worst_move));
}

void run_quasi_invariance(Run& r) {
  const GroupMat a = standard_shift(r.G);
  const auto rows = quasi_invariance_mc(r.G, a, standard_qi_functionals(r.G), r.level, static_cast<std::size_t>(r.n),
                                        r.stream, r.workers, r.integer("oversample"));
  for (const auto& q : rows) {
    const Point pt{{"functional", q.name}};
    r.row(pt, "shifted", q.shifted);
    r.row(pt, "weighted", q.weighted);
    r.row(pt, "defect", q.defect);
    r.check(q.within_3sigma, "change of variables fails at 3 sigma for " + q.name);
  }
  if (r.G.kind() != GroupKind::torus) return;
  // Abelian closed forms: shift -t log a and density exp(-c w(1) - c^2/2).
  const double c = r.G.project(log_grp(a))(0);
  const int n_point = r.integer("n_pointwise");
  std::vector<double> dens(static_cast<std::size_t>(n_point)), shift(static_cast<std::size_t>(n_point));
  parallel_for(dens.size(), r.workers, [&](std::size_t s) {
    const SampledPath w = sample_brownian(1, r.level, r.stream.substream(2'000'000 + s));
    const double closed = std::exp(-c * w.at(w.cells(), 0) - 0.5 * c * c);
    dens[s] = std::abs(quasi_invariance_weight(r.G, a, w) - closed) / closed;
    const SampledPath psi = retraction_shift(r.G, a, w, r.level);
    double worst = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) worst = std::max(worst, std::abs(psi.at(k, 0) + c * psi.time(k)));
    shift[s] = worst;
  });
  const double md = *std::max_element(dens.begin(), dens.end());
  const double ms = *std::max_element(shift.begin(), shift.end());
  r.row({}, "max_density_defect", md, kNaN, dens.size());
  r.row({}, "max_shift_defect", ms, kNaN, shift.size());
  r.check(md < 1e-10 && ms < 1e-10, "abelian closed forms missed");
}

void run_weitzenboeck(Run& r) {
  const std::vector<int> Ks = r.integers("k_list");
  const int modes = r.integer("modes");
  const bool abelian = r.G.kind() == GroupKind::torus;
  std::vector<WeitzenboeckStudy> studies(static_cast<std::size_t>(r.n));
  parallel_for(studies.size(), r.workers, [&](std::size_t s) {
    const auto [alpha, h] = random_form_pair(r.G, r.level, modes, r.stream.substream(s));
    studies[s] = weitzenboeck_truncation(r.G, alpha, h, Ks);
  });
  for (std::size_t s = 0; s < studies.size(); ++s) {
    const WeitzenboeckStudy& st = studies[s];
    const std::string pair = std::to_string(s);
    for (const auto& sum : st.sums) {
      const Point pt{{"pair", pair}, {"K", std::to_string(sum.K)}};
      r.row(pt, "S1", sum.S1, kNaN, 1);
      r.row(pt, "S2", sum.S2, kNaN, 1);
      r.row(pt, "total", sum.total(), kNaN, 1);
    }
    const Point pt{{"pair", pair}};
    r.row(pt, "closed", st.closed, kNaN, 1);
    r.row(pt, "relative_error", st.relative_error(), kNaN, 1);
    r.row(pt, "cauchy", st.cauchy() ? 1.0 : 0.0, kNaN, 1);
    if (st.sums.size() >= 2) {
      // Diagnostic only: the S1 tail decays like 1/K.
      const auto& last = st.sums.back();
      const auto& prev = st.sums[st.sums.size() - 2];
      const double q = static_cast<double>(last.K) / static_cast<double>(prev.K);
      const double rich = (q * last.total() - prev.total()) / (q - 1.0);
      r.row(pt, "richardson_total", rich, kNaN, 1);
      r.row(pt, "richardson_relative_error", std::abs(rich - st.closed) / std::max(std::abs(st.closed), 1e-300), kNaN,
            1);
    }
    if (abelian) {
      double worst = std::abs(st.closed);
      for (const auto& sum : st.sums) worst = std::max({worst, std::abs(sum.S1), std::abs(sum.S2)});
      r.check(worst < 1e-12, "abelian Weitzenboeck terms do not vanish on pair " + pair);
    } else {
      r.check(st.cauchy(), "sums are not Cauchy on pair " + pair);
      r.check(st.relative_error() <= 0.02, "truncated total off by " + shortest(st.relative_error()) + " on pair " + pair);
    }
  }
}

void run_ibp(Run& r) {
  const IbpInputs in = standard_ibp_inputs(r.G, r.level);
  IbpSettings set;
  set.level = r.level;
  set.n_samples = static_cast<std::size_t>(r.n);
  set.fd_step = r.real("fd_step");
  set.workers = r.workers;
  const bool abelian = r.G.kind() == GroupKind::torus;
  const std::vector<double> eps = abelian ? std::vector<double>{r.reals("epsilon_list").front()} : r.reals("epsilon_list");
  std::vector<double> bias;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const TubeSpec tube{eps[i], 1e-6, r.integer("resolve_level")};
    const IbpReport rep = ibp_mc_check(r.G, in.f, in.g, in.h, tube, set, r.stream.substream(i));
    const Point pt = abelian ? Point{{"sampler", rep.sampler}} : Point{{"sampler", rep.sampler}, {"epsilon", shortest(eps[i])}};
    r.row(pt, "lhs", rep.lhs);
    r.row(pt, "rhs", rep.rhs);
    r.row(pt, "defect", rep.defect);
    r.row(pt, "acceptance", static_cast<double>(rep.accepted) / static_cast<double>(rep.proposals), kNaN, rep.proposals);
    r.check(rep.within_3sigma, "IBP defect outside 3 sigma at epsilon " + shortest(eps[i]));
    if (abelian) {
      // f = sin(beta(1/2)), g = cos(beta(1/2)), h = sin(pi t) on the Brownian bridge.
      const double oracle = 0.5 * (1.0 + std::exp(-0.5));
      r.row(pt, "oracle", oracle, kNaN, 0);
      r.check(std::abs(rep.lhs.mean - oracle) <= 3.0 * rep.lhs.std_error, "bridge estimate misses the oracle");
    } else {
      r.row(pt, "raw_defect", rep.raw_defect);
      r.row(pt, "bias", rep.bias);
      bias.push_back(std::abs(rep.bias.mean));
    }
  }
  if (bias.size() >= 2) r.check(bias.back() < bias.front(), "tube bias does not decrease with epsilon");
}

// ---------------------------------------------------------------------------

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> v;
    v.push_back({{"dyadic-convergence",
                  "Decay of the dyadic remainder norms of Brownian paths and their areas as the dyadic "
                  "level N grows (the approximation theorem for the level-two lift)",
                  12, 8, {}},
                 {{{"dim", "1", "Brownian dimension"}, Kind::integer, 1, 8},
                  {{"n_lo", "2", "smallest dyadic level N"}, Kind::integer, 1, 20},
                  {{"n_hi", "7", "largest dyadic level N"}, Kind::integer, 1, 20},
                  {{"n_boot", "200", "bootstrap resamples for the slope CI"}, Kind::integer, 10, 100000}},
                 4, 14, 2, run_dyadic_convergence,
                 [](const ExperimentConfig& c, int level, std::vector<std::string>& errs) {
                   const auto lo = parse_int(c.params.count("n_lo") ? c.params.at("n_lo") : "2");
                   const auto hi = parse_int(c.params.count("n_hi") ? c.params.at("n_hi") : "7");
                   if (lo && hi && !(*lo < *hi && *hi < level))
                     errs.push_back("dyadic-convergence needs n_lo < n_hi < level");
                 }});
    v.push_back({{"flow-identities",
                  "Left translation, the zeta and Z shift identities and their round trip for the rough flow "
                  "driven by Brownian motion on the group (the flow shift proposition)",
                  10, 4, {}},
                 {{{"oversample", "6", "extra dyadic levels for the zeta flow"}, Kind::integer, 0, 8}},
                 2, 14, 1, run_flow_identities, nullptr});
    v.push_back({{"small-ball",
                  "Positive probability that a coarse dyadic Brownian path satisfies the path and area "
                  "constraints against a fixed path (the positivity lemma)",
                  9, 2000, {}},
                 {{{"epsilon", "1.5", "bound on every constraint"}, Kind::real, 1e-9, 1e9},
                  {{"n_list", "3,6", "dyadic levels N"}, Kind::int_list, 0, 12}},
                 2, 12, 1, run_small_ball,
                 [](const ExperimentConfig& c, int level, std::vector<std::string>& errs) {
                   auto it = c.params.find("n_list");
                   if (it == c.params.end()) return;
                   for (const auto& s : split_list(it->second)) {
                     auto N = parse_int(s);
                     if (N && *N > level) errs.push_back("small-ball: N must not exceed the quadrature level");
                   }
                 }});
    v.push_back({{"poincare-mc",
                  "Variance against Dirichlet energy for the standard Gaussian restricted to convex domains, "
                  "plus the product-domain Poincare certificate (the Gaussian Poincare lemma on convex sets)",
                  0, 20000, {}},
                 {{{"toy_functions", "10", "random polynomials for the product certificate"}, Kind::integer, 1, 1000}},
                 0, 0, 100, run_poincare_mc, nullptr});
    v.push_back({{"inclusion-audit",
                  "Monte Carlo search for counterexamples to the nested inclusion of rough-path balls "
                  "under a small Cameron-Martin shift of the centre (the ball inclusion lemma)",
                  7, 200, {}},
                 {{{"dim", "2", "path dimension"}, Kind::integer, 1, 4},
                  {{"r", "0.5", "radius of the source ball"}, Kind::real, 1e-6, 1e6},
                  {{"delta", "0.5", "relative enlargement of the target ball"}, Kind::real, 1e-6, 1.0 - 1e-9},
                  {{"n_embedding", "16", "paths used to estimate the embedding constant"}, Kind::integer, 1, 10000}},
                 3, 10, 1, run_inclusion_audit, nullptr});
    v.push_back({{"stokes-audit",
                  "Line and surface Stokes identities for cylindrical polynomial functionals on finite "
                  "Cameron-Martin frames (the Stokes lemma on Wiener space)",
                  8, 20, {}},
                 {{{"frame", "4", "number of frame vectors"}, Kind::integer, 1, 16},
                  {{"degree", "4", "maximum polynomial degree"}, Kind::integer, 1, 8}},
                 3, 12, 1, run_stokes_audit,
                 [](const ExperimentConfig& c, int level, std::vector<std::string>& errs) {
                   auto it = c.params.find("frame");
                   const auto k = parse_int(it == c.params.end() ? "4" : it->second);
                   if (k && 2 * *k >= (1 << level)) errs.push_back("stokes-audit: frame too large for the level");
                 }});
    v.push_back({{"retraction-audit",
                  "Pinning accuracy and idempotence of the retraction of tube paths onto based loops "
                  "(the construction of the pinned loop measure)",
                  8, 50, {}},
                 {{{"epsilon", "0.3", "tube radius"}, Kind::real, 1e-6, 3.14},
                  {{"resolve_offset", "6", "extra levels for the retracted path"}, Kind::integer, 0, 10}},
                 2, 14, 1, run_retraction_audit, nullptr});
    v.push_back({{"quasi-invariance-mc",
                  "Change of variables for the Wiener measure under the endpoint shift of the flow, "
                  "with closed forms in the abelian case (quasi-invariance of the Brownian flow)",
                  6, 2000, {}},
                 {{{"oversample", "4", "extra levels for the shifted path"}, Kind::integer, 0, 8},
                  {{"n_pointwise", "100", "samples for the abelian closed-form check"}, Kind::integer, 1, 100000}},
                 2, 12, 2, run_quasi_invariance, nullptr});
    v.push_back({{"weitzenboeck-truncation",
                  "Truncated orthonormal-basis sums of the Weitzenboeck formula against the closed "
                  "Casimir expressions (the curvature term on the loop group)",
                  10, 5, {}},
                 {{{"k_list", "4,8,16,32", "truncation orders K"}, Kind::int_list, 1, 4096},
                  {{"modes", "3", "sine modes in the random forms"}, Kind::integer, 1, 64}},
                 3, 14, 1, run_weitzenboeck,
                 [](const ExperimentConfig& c, int level, std::vector<std::string>& errs) {
                   auto it = c.params.find("k_list");
                   for (const auto& s : split_list(it == c.params.end() ? "4,8,16,32" : it->second)) {
                     auto K = parse_int(s);
                     if (K && 2 * *K >= (1 << level)) errs.push_back("weitzenboeck-truncation: K=" + s + " needs 2K < 2^level");
                   }
                 }});
    v.push_back({{"ibp-mc",
                  "Integration by parts for cylinder functions of the pinned loop under the tube "
                  "approximation (the integration by parts formula on the loop group)",
                  5, 2000, {}},
                 {{{"epsilon_list", "0.3,0.15", "tube radii"}, Kind::real_list, 1e-6, 3.14},
                  {{"resolve_level", "12", "level of the retracted paths"}, Kind::integer, 2, 20},
                  {{"fd_step", "1e-4", "finite-difference step for the derivative"}, Kind::real, 1e-12, 1.0}},
                 2, 10, 2, run_ibp, nullptr});
    for (auto& e : v)
      for (const auto& p : e.params) e.info.params.push_back(p.spec);
    return v;
  }();
  return entries;
}

const Entry* find_entry(const std::string& name) {
  for (const auto& e : registry())
    if (e.info.name == name) return &e;
  return nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::config, std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  ExperimentConfig c;
  bool have_seed = false;
  auto want_int = [](const std::string& key, const std::string& v) {
    auto x = parse_int(v);
    if (!x) fail(ErrorCode::config, "config: " + key + " is not an integer: " + v);
    return *x;
  };
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      fail(ErrorCode::config, "config: key outside a section: " + section);
    if (section == "run") {
      for (const auto& [k, v] : body) {
        const std::string s = v.data();
        if (k == "experiment") {
          c.experiment = s;
        } else if (k == "seed") {
          if (!s.empty() && s[0] == '-') fail(ErrorCode::config, "config: seed must be nonnegative");
          std::uint64_t x = 0;
          auto res = std::from_chars(s.data(), s.data() + s.size(), x);
          if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            fail(ErrorCode::config, "config: seed is not an unsigned integer: " + s);
          c.seed = x;
          have_seed = true;
        } else if (k == "level") {
          c.level = static_cast<int>(want_int(k, s));
        } else if (k == "n_seeds") {
          c.n_seeds = static_cast<int>(want_int(k, s));
        } else if (k == "group") {
          c.group = s;
        } else {
          fail(ErrorCode::config, "config: unknown key [run] " + k);
        }
      }
    } else if (section == "besov") {
      for (const auto& [k, v] : body) {
        const std::string s = v.data();
        if (k == "m") {
          c.besov.m = static_cast<int>(want_int(k, s));
        } else if (k == "theta" || k == "theta_prime") {
          auto x = parse_double(s);
          if (!x) fail(ErrorCode::config, "config: " + k + " is not a number: " + s);
          (k == "theta" ? c.besov.theta : c.besov.theta_prime) = *x;
        } else if (k == "relaxed") {
          auto b = parse_bool(s);
          if (!b) fail(ErrorCode::config, "config: relaxed must be a boolean: " + s);
          c.besov.relaxed = *b;
        } else {
          fail(ErrorCode::config, "config: unknown key [besov] " + k);
        }
      }
    } else if (section == "params") {
      for (const auto& [k, v] : body) c.params[k] = v.data();
    } else {
      fail(ErrorCode::config, "config: unknown section [" + section + "]");
    }
  }
  if (!have_seed) {
    if (const char* env = std::getenv(kSeedEnv)) {
      const std::string s = env;
      std::uint64_t x = 0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        fail(ErrorCode::config, std::string(kSeedEnv) + " is not an unsigned integer: " + s);
      c.seed = x;
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[run]\nexperiment = " << c.experiment << "\nseed = " << c.seed << "\ngroup = " << c.group << "\n";
  if (c.level >= 0) o << "level = " << c.level << "\n";
  if (c.n_seeds >= 0) o << "n_seeds = " << c.n_seeds << "\n";
  o << "\n[besov]\nm = " << c.besov.m << "\ntheta = " << shortest(c.besov.theta)
    << "\ntheta_prime = " << shortest(c.besov.theta_prime) << "\nrelaxed = " << (c.besov.relaxed ? "true" : "false")
    << "\n";
  if (!c.params.empty()) {
    o << "\n[params]\n";
    for (const auto& [k, v] : c.params) o << k << " = " << v << "\n";
  }
  return o.str();
}

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  const Entry* e = find_entry(name);
  return e ? &e->info : nullptr;
}

ExperimentConfig default_config(const std::string& experiment) {
  if (!find_entry(experiment)) fail(ErrorCode::config, "unknown experiment: " + experiment);
  ExperimentConfig c;
  c.experiment = experiment;
  return c;
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  const Entry* e = find_entry(c.experiment);
  if (!e) {
    errs.push_back(c.experiment.empty() ? "missing [run] experiment" : "unknown experiment: " + c.experiment);
    return errs;
  }
  if (c.group != "so3" && c.group != "abelian-stub") errs.push_back("group must be so3 or abelian-stub");
  try {
    c.besov.validate();
  } catch (const Error& err) {
    errs.push_back(std::string("besov: ") + err.what());
  }
  const int level = c.level < 0 ? e->info.default_level : c.level;
  if (level < e->min_level || level > e->max_level)
    errs.push_back("level must lie in [" + std::to_string(e->min_level) + ", " + std::to_string(e->max_level) +
                   "] for " + c.experiment);
  const int n = c.n_seeds < 0 ? e->info.default_n_seeds : c.n_seeds;
  if (n < e->min_n_seeds) errs.push_back("n_seeds must be at least " + std::to_string(e->min_n_seeds));

  for (const auto& [k, v] : c.params) {
    const Param* p = nullptr;
    for (const auto& q : e->params)
      if (q.spec.key == k) p = &q;
    if (!p) {
      errs.push_back("unknown parameter for " + c.experiment + ": " + k);
      continue;
    }
    const bool is_list = p->kind == Kind::int_list || p->kind == Kind::real_list;
    const bool is_int = p->kind == Kind::integer || p->kind == Kind::int_list;
    const auto items = is_list ? split_list(v) : std::vector<std::string>{v};
    if (items.empty()) errs.push_back(k + ": empty list");
    for (const auto& s : items) {
      std::optional<double> x;
      if (is_int) {
        if (auto i = parse_int(s)) x = static_cast<double>(*i);
      } else {
        x = parse_double(s);
      }
      if (!x) {
        errs.push_back(k + ": cannot parse '" + s + "' as " + (is_int ? "an integer" : "a number"));
      } else if (*x < p->lo || *x > p->hi) {
        errs.push_back(k + ": " + s + " outside [" + shortest(p->lo) + ", " + shortest(p->hi) + "]");
      }
    }
  }
  if (errs.empty() && e->check) e->check(c, level, errs);
  return errs;
}

RunResult run_experiment(const ExperimentConfig& c, int workers) {
  const auto errs = validate(c);
  if (!errs.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errs) msg += "\n  " + e;
    fail(ErrorCode::config, msg);
  }
  require(workers >= 1, ErrorCode::invalid_argument, "workers must be positive");
  const Entry& e = *find_entry(c.experiment);
  Run r{c,
        e,
        LieGroup::from_name(c.group),
        c.level < 0 ? e.info.default_level : c.level,
        c.n_seeds < 0 ? e.info.default_n_seeds : c.n_seeds,
        workers,
        SeededStream{c.seed, 0},
        {}};
  e.run(r);
  return std::move(r.result);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string to_csv(const std::vector<ResultRow>& rows, bool include_timing) {
  std::string out = kCsvHeader;
  out += '\n';
  auto num = [](double x) {
    if (std::isnan(x)) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out += csv_field(r.experiment) + ',' + csv_field(r.group) + ',' + std::to_string(r.level) + ',' +
           csv_field(r.param) + ',' + csv_field(r.statistic) + ',' + num(r.value) + ',' + num(r.std_error) + ',' +
           std::to_string(r.n) + ',' + std::to_string(r.seed) + ',';
    if (include_timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", r.wall_time_ms);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

IbpInputs standard_ibp_inputs(const LieGroup& G, int level) {
  if (G.kind() == GroupKind::torus) {
    return {{{0.5}, [](const std::vector<GroupMat>& g) { return g[0](1, 0); }},
            {{0.5}, [](const std::vector<GroupMat>& g) { return g[0](0, 0); }},
            SampledPath::from_function(1, level, [](double t, double* x) { x[0] = std::sin(M_PI * t); })};
  }
  return {{{0.25}, [](const std::vector<GroupMat>& g) { return g[0](2, 1) - g[0](1, 2); }},
          {{0.75}, [](const std::vector<GroupMat>& g) { return g[0](2, 1) - g[0](1, 2) + g[0].trace(); }},
          SampledPath::from_function(3, level, [](double t, double* x) {
            x[0] = std::sin(M_PI * t);
            x[1] = 0.5 * std::sin(2.0 * M_PI * t);
            x[2] = 0.3 * t * (1.0 - t);
          })};
}

std::vector<ConvexDomain> standard_convex_domains() {
  return {
      {"slab", 2, [](const Eigen::VectorXd& x) { return std::abs(x(0)) < 0.5; }},
      {"ball", 3, [](const Eigen::VectorXd& x) { return x.squaredNorm() < 2.25; }},
      {"box", 4, [](const Eigen::VectorXd& x) {
         return x(0) > -1.0 && x(0) < 2.0 && (x.tail(3).array().abs() < 0.5).all();
       }},
      {"cap", 5, [](const Eigen::VectorXd& x) { return x(0) + x(1) > -0.3 && x.squaredNorm() < 4.0; }},
      {"simplex", 6, [](const Eigen::VectorXd& x) { return (x.array() > -1.0).all() && x.sum() < 1.0; }},
  };
}

std::vector<TestFunction> standard_battery(int dim) {
  require(dim >= 2, ErrorCode::invalid_argument, "standard_battery: dim must be at least 2");
  using V = Eigen::VectorXd;
  auto unit = [dim](int i, double c) {
    V g = V::Zero(dim);
    g(i) = c;
    return g;
  };
  const int last = dim - 1;
  return {
      {"x1", [](const V& x) { return x(0); }, [unit](const V&) { return unit(0, 1.0); }},
      {"x1+x_n/2", [last](const V& x) { return x(0) + 0.5 * x(last); },
       [unit, last](const V&) {
         V g = unit(0, 1.0);
         g(last) += 0.5;
         return g;
       }},
      {"x1^2", [](const V& x) { return x(0) * x(0); }, [unit](const V& x) { return unit(0, 2.0 * x(0)); }},
      {"x1*x2", [](const V& x) { return x(0) * x(1); },
       [unit](const V& x) {
         V g = unit(0, x(1));
         g(1) = x(0);
         return g;
       }},
      {"sin(x1)", [](const V& x) { return std::sin(x(0)); }, [unit](const V& x) { return unit(0, std::cos(x(0))); }},
      {"exp(0.3 x2)", [](const V& x) { return std::exp(0.3 * x(1)); },
       [unit](const V& x) { return unit(1, 0.3 * std::exp(0.3 * x(1))); }},
      {"|x|^2", [](const V& x) { return x.squaredNorm(); }, [](const V& x) { return V(2.0 * x); }},
      {"cos(x1-x2)", [](const V& x) { return std::cos(x(0) - x(1)); },
       [unit](const V& x) {
         const double s = -std::sin(x(0) - x(1));
         V g = unit(0, s);
         g(1) = -s;
         return g;
       }},
      {"x1^3", [](const V& x) { return x(0) * x(0) * x(0); }, [unit](const V& x) { return unit(0, 3.0 * x(0) * x(0)); }},
      {"log(1+x_n^2)", [last](const V& x) { return std::log1p(x(last) * x(last)); },
       [unit, last](const V& x) { return unit(last, 2.0 * x(last) / (1.0 + x(last) * x(last))); }},
  };
}

std::vector<PathFunctional> standard_qi_functionals(const LieGroup& G) {
  const int last = G.dim() - 1;
  const int mid = std::min(1, last);
  return {{"end1", [](const SampledPath& w) { return w.at(w.cells(), 0); }},
          {"cos_mid", [mid](const SampledPath& w) { return std::cos(w.at(w.cells() / 2, mid)); }},
          {"sq_end", [last](const SampledPath& w) {
             const double x = w.at(w.cells(), last);
             return x * x;
           }}};
}

GroupMat standard_shift(const LieGroup& G) {
  if (G.kind() == GroupKind::torus) return exp_alg(AlgVec(0.0, 0.0, 0.4));
  return exp_alg(AlgVec(0.4, -0.2, 0.3));
}

FlowInputs standard_flow_inputs(const LieGroup& G, int level) {
  FlowInputs in;
  if (G.kind() == GroupKind::torus) {
    in.a = exp_alg(AlgVec(0.0, 0.0, 0.5));
    in.phi = [](double t) { return exp_alg(AlgVec(0.0, 0.0, 0.7 * t + 0.4 * std::sin(M_PI * t))); };
    in.h = SampledPath::from_function(1, level, [](double t, double* x) { x[0] = 0.8 * std::sin(M_PI * t) + 0.3 * t; });
    return in;
  }
  in.a = exp_alg(AlgVec(0.3, -0.5, 0.7));
  const AlgVec v(0.6, 0.2, -0.4), u(-0.3, 0.5, 0.25);
  in.phi = [v, u](double t) { return exp_alg(t * v) * exp_alg(std::sin(M_PI * t) * u); };
  in.h = SampledPath::from_function(3, level, [](double t, double* x) {
    x[0] = 0.8 * std::sin(M_PI * t);
    x[1] = 0.5 * t * t;
    x[2] = -0.4 * std::sin(2.0 * M_PI * t) + 0.2 * t;
  });
  return in;
}

std::pair<LoopOneForm, SampledPath> random_form_pair(const LieGroup& G, int level, int modes, SeededStream stream) {
  RandomSource rng(stream);
  const int d = G.dim();
  SampledPath a(d, level), h(d, level);
  for (int k = 1; k <= modes; ++k)
    for (int i = 0; i < d; ++i) {
      a = a + rng.normal() * H0Frame::mode(d, k, i, level);
      h = h + rng.normal() * H0Frame::mode(d, k, i, level);
    }
  return {LoopOneForm{a}, h};
}

}  // namespace roughloop
