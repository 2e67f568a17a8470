#include "roughloop/gauss_sampler.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "roughloop/rough_lift.hpp"

namespace roughloop {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SampledPath sample_brownian(int d, int M, SeededStream stream) {
  require(d >= 1, ErrorCode::invalid_argument, "sample_brownian: dimension must be positive");
  SampledPath shape(d, M);
  const std::size_t n = shape.cells();
  const double sd = std::sqrt(shape.step());
  std::vector<double> vals(static_cast<std::size_t>(d) * (n + 1), 0.0);
  RandomSource rng(stream);
  for (std::size_t k = 0; k < n; ++k)
    for (int i = 0; i < d; ++i) {
      double* c = vals.data() + static_cast<std::size_t>(i) * (n + 1);
      c[k + 1] = c[k] + sd * rng.normal();
    }
  return SampledPath::from_values(d, M, std::move(vals));
}

SampledPath increment_layer(const SampledPath& w, int N) {
  require(N >= 1, ErrorCode::invalid_argument, "increment_layer: N must be at least 1");
  return dyadic_approx(w, N) - dyadic_approx(w, N - 1);
}

namespace {

SimplexGrid products(const SampledPath& x, const SampledPath& y) {
  std::vector<SimplexGrid> parts;
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < y.dim(); ++j) parts.push_back(SimplexGrid::product(x.component(i), y.component(j), x.level()));
  return parts.size() == 1 ? parts.front() : SimplexGrid::stack(parts);
}

}  // namespace

std::array<double, kConvergenceStats> convergence_statistics(const SampledPath& w, int N, const BesovParams& p) {
  require(N >= 1 && N + 1 <= w.level(), ErrorCode::invalid_argument, "convergence statistics need 1 <= N < level");
  const SampledPath wN = dyadic_approx(w, N);
  const SampledPath wN1 = dyadic_approx(w, N + 1);
  const SampledPath perp = w - wN;
  std::array<double, kConvergenceStats> out{};
  out[0] = path_besov_norm(wN - dyadic_approx(w, N - 1), p.m, p.theta / 2.0);
  out[1] = besov_norm(iterated_integral(wN1, wN1) - iterated_integral(wN, wN), p.m, p.theta);
  out[2] = besov_norm(iterated_integral(perp, wN), p.m, p.theta);
  out[3] = besov_norm(products(perp, wN), p.m, p.theta);
  return out;
}

ConvergenceTable convergence_experiment(int d, int M, int N_lo, int N_hi, const BesovParams& p, int n_seeds,
                                        SeededStream stream, int workers, int n_boot) {
  require(N_lo >= 1 && N_hi >= N_lo && N_hi + 1 <= M, ErrorCode::invalid_argument,
          "convergence_experiment: need 1 <= N_lo <= N_hi < M");
  require(n_seeds >= 1, ErrorCode::invalid_argument, "convergence_experiment: n_seeds must be positive");
  const int rows = N_hi - N_lo + 1;
  ConvergenceTable table;
  table.per_seed.assign(static_cast<std::size_t>(n_seeds),
                        std::vector<std::array<double, kConvergenceStats>>(static_cast<std::size_t>(rows)));
  parallel_for(static_cast<std::size_t>(n_seeds), workers, [&](std::size_t s) {
    const SampledPath w = sample_brownian(d, M, stream.substream(s));
    for (int r = 0; r < rows; ++r) table.per_seed[s][static_cast<std::size_t>(r)] = convergence_statistics(w, N_lo + r, p);
  });

  std::vector<double> xs;
  for (int r = 0; r < rows; ++r) {
    ConvergenceRow row;
    row.N = N_lo + r;
    for (int k = 0; k < kConvergenceStats; ++k) {
      std::vector<double> col(static_cast<std::size_t>(n_seeds));
      for (int s = 0; s < n_seeds; ++s) col[static_cast<std::size_t>(s)] = table.per_seed[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      row.mean[static_cast<std::size_t>(k)] = mean_estimate(col);
      row.median[static_cast<std::size_t>(k)] = median(col);
    }
    table.rows.push_back(row);
    xs.push_back(row.N);
  }
  if (rows >= 2) {
    for (int k = 0; k < kConvergenceStats; ++k) {
      std::vector<std::vector<double>> samples(static_cast<std::size_t>(rows), std::vector<double>(static_cast<std::size_t>(n_seeds)));
      for (int r = 0; r < rows; ++r)
        for (int s = 0; s < n_seeds; ++s)
          samples[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = table.per_seed[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      table.slope[static_cast<std::size_t>(k)] =
          bootstrap_log2_median_slope(xs, samples, n_boot, stream.substream(0xB00757A9ull + static_cast<std::uint64_t>(k)));
    }
  }
  return table;
}

SimplexGrid area_step_direct(const SampledPath& w, int N, int i, int j) {
  const SampledPath a = dyadic_approx(w, N + 1), b = dyadic_approx(w, N);
  return SimplexGrid::area(a.component(i), a.component(j), w.level()) -
         SimplexGrid::area(b.component(i), b.component(j), w.level());
}

SimplexGrid area_step_decomposed(const SampledPath& w, int N, int i, int j) {
  const SampledPath wN = dyadic_approx(w, N);
  const SampledPath z = increment_layer(w, N + 1);
  const int M = w.level();
  return SimplexGrid::product(wN.component(i), z.component(j), M) - SimplexGrid::area(z.component(j), wN.component(i), M) +
         SimplexGrid::area(z.component(i), wN.component(j), M) + SimplexGrid::area(z.component(i), z.component(j), M);
}

SmallBallResult small_ball_estimate(const std::vector<SmallBallConstraint>& constraints, int N, int n_seeds,
                                    SeededStream stream, int quad_level, int workers) {
  require(n_seeds >= 1, ErrorCode::invalid_argument, "small_ball_estimate: n_seeds must be positive");
  require(quad_level >= N && N >= 0, ErrorCode::invalid_argument, "small_ball_estimate: need 0 <= N <= quad_level");
  // 0 outside, 1 inside, 2 boundary band
  std::vector<int> verdict(static_cast<std::size_t>(n_seeds), 1);
  parallel_for(static_cast<std::size_t>(n_seeds), workers, [&](std::size_t s) {
    if (constraints.empty()) return;
    const SampledPath wN = sample_brownian(1, N, stream.substream(s)).upsample(quad_level);
    int v = 1;
    for (const auto& c : constraints) {
      const double x = c.value(wN);
      if (std::abs(x - c.bound) <= 1e-6 * std::abs(c.bound)) {
        v = 2;
      } else if (x > c.bound) {
        v = 0;
        break;
      }
    }
    verdict[s] = v;
  });
  SmallBallResult out;
  std::size_t used = 0;
  for (int v : verdict) {
    if (v == 2) {
      ++out.boundary;
      continue;
    }
    ++used;
    if (v == 1) ++out.accepted;
  }
  require(used > 0, ErrorCode::invalid_argument, "small_ball_estimate: every sample fell in the boundary band");
  out.estimate = wilson_estimate(out.accepted, used);
  return out;
}

std::vector<SmallBallConstraint> positivity_constraints(const std::vector<SampledPath>& z, double eps,
                                                        const BesovParams& p) {
  std::vector<SmallBallConstraint> out;
  out.push_back({"path", eps, [p](const SampledPath& w) { return path_besov_norm(w, p.m, p.theta_prime / 2.0); }});
  for (std::size_t i = 0; i < z.size(); ++i) {
    require(z[i].dim() == 1, ErrorCode::invalid_argument, "positivity_constraints: scalar paths expected");
    const SampledPath zi = z[i];
    out.push_back({"area_w_z" + std::to_string(i + 1), eps, [p, zi](const SampledPath& w) {
                     const SampledPath zz = zi.level() == w.level() ? zi : zi.upsample(w.level());
                     return besov_norm(SimplexGrid::area(w.component(0), zz.component(0), w.level()), p.m, p.theta);
                   }});
    out.push_back({"area_z_w" + std::to_string(i + 1), eps, [p, zi](const SampledPath& w) {
                     const SampledPath zz = zi.level() == w.level() ? zi : zi.upsample(w.level());
                     return besov_norm(SimplexGrid::area(zz.component(0), w.component(0), w.level()), p.m, p.theta);
                   }});
  }
  return out;
}

}  // namespace roughloop
