#include "roughloop/dyadic_paths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace roughloop {

namespace {

std::size_t grid_cells(int level) {
  require(level >= 0 && level <= 24, ErrorCode::invalid_argument, "level must be in [0,24]");
  return std::size_t{1} << level;
}

}  // namespace

void BesovParams::validate() const {
  std::ostringstream err;
  if (m < 4 || m % 2 != 0) err << "m must be an even integer >= 4 (got " << m << "); ";
  if (!(theta > 0.0 && theta < 1.0)) err << "theta must lie in (0,1); ";
  if (!(theta_prime > theta && theta_prime < 1.0)) err << "theta_prime must satisfy theta < theta_prime < 1; ";
  if (relaxed) {
    if (!(m * (1.0 - theta) > 2.0)) err << "relaxed parameters need m(1-theta) > 2; ";
  } else {
    if (!(theta > 2.0 / 3.0)) err << "theta must exceed 2/3; ";
    if (!(m * (1.0 - theta_prime) > 4.0)) err << "m(1-theta_prime) must exceed 4; ";
  }
  const std::string msg = err.str();
  if (!msg.empty()) fail(ErrorCode::invalid_argument, msg.substr(0, msg.size() - 2));
}

BesovParams BesovParams::standard(int m, double theta, double theta_prime) {
  BesovParams p{m, theta, theta_prime, false};
  p.validate();
  return p;
}

BesovParams BesovParams::relaxed_params(int m, double theta, double theta_prime) {
  BesovParams p{m, theta, theta_prime, true};
  p.validate();
  return p;
}

// ---------------------------------------------------------------- SampledPath

SampledPath::SampledPath(int dim, int level) : dim_(dim), level_(level), n_(grid_cells(level)) {
  require(dim >= 1, ErrorCode::invalid_argument, "path dimension must be positive");
  values_.assign(static_cast<std::size_t>(dim) * (n_ + 1), 0.0);
}

SampledPath SampledPath::from_values(int dim, int level, std::vector<double> component_major) {
  SampledPath p(dim, level);
  require(component_major.size() == p.values_.size(), ErrorCode::invalid_argument,
          "path values must hold dim * (2^level + 1) numbers");
  for (int i = 0; i < dim; ++i)
    require(component_major[static_cast<std::size_t>(i) * (p.n_ + 1)] == 0.0, ErrorCode::invalid_argument,
            "paths must start at the origin");
  p.values_ = std::move(component_major);
  return p;
}

SampledPath SampledPath::from_points(int dim, int level, const std::vector<std::vector<double>>& points) {
  SampledPath p(dim, level);
  require(points.size() == p.n_ + 1, ErrorCode::invalid_argument, "need 2^level + 1 points");
  std::vector<double> vals(p.values_.size());
  for (std::size_t k = 0; k <= p.n_; ++k) {
    require(points[k].size() == static_cast<std::size_t>(dim), ErrorCode::invalid_argument, "point dimension mismatch");
    for (int i = 0; i < dim; ++i) vals[static_cast<std::size_t>(i) * (p.n_ + 1) + k] = points[k][static_cast<std::size_t>(i)];
  }
  return from_values(dim, level, std::move(vals));
}

SampledPath SampledPath::from_function(int dim, int level, const std::function<void(double, double*)>& f) {
  SampledPath p(dim, level);
  std::vector<double> buf(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k <= p.n_; ++k) {
    f(p.time(k), buf.data());
    for (int i = 0; i < dim; ++i) p.values_[static_cast<std::size_t>(i) * (p.n_ + 1) + k] = buf[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < dim; ++i)
    require(p.values_[static_cast<std::size_t>(i) * (p.n_ + 1)] == 0.0, ErrorCode::invalid_argument,
            "paths must start at the origin");
  return p;
}

SampledPath SampledPath::linear(int level, const std::vector<double>& v) {
  const int d = static_cast<int>(v.size());
  return from_function(d, level, [&](double t, double* out) {
    for (int i = 0; i < d; ++i) out[i] = t * v[static_cast<std::size_t>(i)];
  });
}

std::vector<double> SampledPath::point(std::size_t k) const {
  std::vector<double> out(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) out[static_cast<std::size_t>(i)] = at(k, i);
  return out;
}

SampledPath SampledPath::component_path(int i) const {
  require(i >= 0 && i < dim_, ErrorCode::out_of_range, "component index out of range");
  auto c = component(i);
  return from_values(1, level_, std::vector<double>(c.begin(), c.end()));
}

SampledPath SampledPath::upsample(int L) const {
  require(L >= level_, ErrorCode::invalid_argument, "upsample target must not be coarser than the path");
  if (L == level_) return *this;
  SampledPath out(dim_, L);
  const std::size_t r = std::size_t{1} << (L - level_);
  const double inv_r = 1.0 / static_cast<double>(r);
  for (int i = 0; i < dim_; ++i) {
    auto src = component(i);
    double* dst = out.values_.data() + static_cast<std::size_t>(i) * (out.n_ + 1);
    for (std::size_t c = 0; c < n_; ++c) {
      const double a = src[c], b = src[c + 1];
      for (std::size_t q = 0; q < r; ++q) dst[c * r + q] = a + static_cast<double>(q) * inv_r * (b - a);
    }
    dst[out.n_] = src[n_];
  }
  return out;
}

SampledPath SampledPath::restrict_to(int N) const {
  require(N >= 0 && N <= level_, ErrorCode::invalid_argument, "restriction level must lie in [0, level]");
  SampledPath out(dim_, N);
  const std::size_t r = std::size_t{1} << (level_ - N);
  for (int i = 0; i < dim_; ++i) {
    auto src = component(i);
    for (std::size_t k = 0; k <= out.n_; ++k) out.values_[static_cast<std::size_t>(i) * (out.n_ + 1) + k] = src[k * r];
  }
  return out;
}

void require_same_shape(const SampledPath& a, const SampledPath& b, const char* who) {
  if (a.level() != b.level()) fail(ErrorCode::level_mismatch, std::string(who) + ": paths live on different levels");
  if (a.dim() != b.dim()) fail(ErrorCode::invalid_argument, std::string(who) + ": path dimensions differ");
}

SampledPath SampledPath::operator+(const SampledPath& o) const {
  require_same_shape(*this, o, "path +");
  SampledPath out = *this;
  for (std::size_t q = 0; q < values_.size(); ++q) out.values_[q] += o.values_[q];
  return out;
}

SampledPath SampledPath::operator-(const SampledPath& o) const {
  require_same_shape(*this, o, "path -");
  SampledPath out = *this;
  for (std::size_t q = 0; q < values_.size(); ++q) out.values_[q] -= o.values_[q];
  return out;
}

SampledPath SampledPath::operator*(double c) const {
  SampledPath out = *this;
  for (double& v : out.values_) v *= c;
  return out;
}

SampledPath dyadic_approx(const SampledPath& w, int N) {
  if (N > w.level()) fail(ErrorCode::invalid_argument, "dyadic_approx: N exceeds the stored level");
  require(N >= 0, ErrorCode::invalid_argument, "dyadic_approx: N must be nonnegative");
  return w.restrict_to(N).upsample(w.level());
}

SampledPath dyadic_complement(const SampledPath& w, int N) { return w - dyadic_approx(w, N); }

double cm_norm(const SampledPath& h) {
  double ss = 0.0;
  for (int i = 0; i < h.dim(); ++i) {
    auto c = h.component(i);
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      const double d = c[k + 1] - c[k];
      ss += d * d;
    }
  }
  return std::sqrt(ss * static_cast<double>(h.cells()));
}

double cm_inner(const SampledPath& a, const SampledPath& b) {
  require_same_shape(a, b, "cm_inner");
  double acc = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    auto x = a.component(i);
    auto y = b.component(i);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) acc += (x[k + 1] - x[k]) * (y[k + 1] - y[k]);
  }
  return acc * static_cast<double>(a.cells());
}

// --------------------------------------------------------------- SimplexGrid

namespace {

using Vec = std::shared_ptr<const std::vector<double>>;

Vec share(std::span<const double> s) { return std::make_shared<const std::vector<double>>(s.begin(), s.end()); }

}  // namespace

SimplexGrid SimplexGrid::zero(int level, int ncomp) {
  require(ncomp >= 1, ErrorCode::invalid_argument, "grid needs at least one component");
  SimplexGrid g;
  g.level_ = level;
  g.n_ = grid_cells(level);
  g.ncomp_ = ncomp;
  g.terms_.resize(static_cast<std::size_t>(ncomp));
  return g;
}

SimplexGrid SimplexGrid::increments(const SampledPath& x) {
  SimplexGrid g = zero(x.level(), x.dim());
  for (int i = 0; i < x.dim(); ++i)
    g.terms_[static_cast<std::size_t>(i)].push_back({TermKind::increment, 1.0, share(x.component(i)), nullptr, nullptr});
  return g;
}

SimplexGrid SimplexGrid::product(std::span<const double> x, std::span<const double> y, int level) {
  SimplexGrid g = zero(level, 1);
  require(x.size() == g.n_ + 1 && y.size() == g.n_ + 1, ErrorCode::level_mismatch, "product grid: level mismatch");
  g.terms_[0].push_back({TermKind::product, 1.0, share(x), share(y), nullptr});
  return g;
}

SimplexGrid SimplexGrid::area(std::span<const double> x, std::span<const double> y, int level) {
  SimplexGrid g = zero(level, 1);
  require(x.size() == g.n_ + 1 && y.size() == g.n_ + 1, ErrorCode::level_mismatch, "area grid: level mismatch");
  auto S = std::make_shared<std::vector<double>>(g.n_ + 1, 0.0);
  // Exact per cell for linear interpolants: x at the cell midpoint times dy.
  for (std::size_t k = 0; k < g.n_; ++k) (*S)[k + 1] = (*S)[k] + 0.5 * (x[k] + x[k + 1]) * (y[k + 1] - y[k]);
  g.terms_[0].push_back({TermKind::area, 1.0, share(x), share(y), S});
  return g;
}

SimplexGrid SimplexGrid::dense(int level, int ncomp, const std::function<void(std::size_t, std::size_t, double*)>& f) {
  require(level <= kMaxDenseLevel, ErrorCode::invalid_argument, "dense grids are limited to level 9");
  SimplexGrid g = zero(level, ncomp);
  const std::size_t n1 = g.n_ + 1;
  auto table = std::make_shared<std::vector<double>>(static_cast<std::size_t>(ncomp) * n1 * n1, 0.0);
  std::vector<double> buf(static_cast<std::size_t>(ncomp));
  for (std::size_t j = 0; j < n1; ++j)
    for (std::size_t k = j; k < n1; ++k) {
      f(j, k, buf.data());
      for (int c = 0; c < ncomp; ++c) (*table)[static_cast<std::size_t>(c) * n1 * n1 + j * n1 + k] = buf[static_cast<std::size_t>(c)];
    }
  g.dense_ = table;
  return g;
}

void SimplexGrid::row(int comp, std::size_t j, double* out) const {
  const std::size_t len = n_ + 1 - j;
  if (dense_) {
    const std::size_t n1 = n_ + 1;
    const double* src = dense_->data() + static_cast<std::size_t>(comp) * n1 * n1 + j * n1 + j;
    std::copy(src, src + len, out);
    return;
  }
  std::fill(out, out + len, 0.0);
  for (const Term& t : terms_[static_cast<std::size_t>(comp)]) {
    const double* x = t.x->data() + j;
    const double c = t.coef;
    const double xj = x[0];
    switch (t.kind) {
      case TermKind::increment:
        for (std::size_t i = 0; i < len; ++i) out[i] += c * (x[i] - xj);
        break;
      case TermKind::product: {
        const double* y = t.y->data() + j;
        const double yj = y[0];
        for (std::size_t i = 0; i < len; ++i) out[i] += c * ((x[i] - xj) * (y[i] - yj));
        break;
      }
      case TermKind::area: {
        const double* y = t.y->data() + j;
        const double* S = t.prefix->data() + j;
        const double yj = y[0], Sj = S[0];
        for (std::size_t i = 0; i < len; ++i) out[i] += c * ((S[i] - Sj) - xj * (y[i] - yj));
        break;
      }
    }
  }
}

double SimplexGrid::value(int comp, std::size_t j, std::size_t k) const {
  require(comp >= 0 && comp < ncomp_, ErrorCode::out_of_range, "grid component out of range");
  require(j <= k && k <= n_, ErrorCode::out_of_range, "grid pair must satisfy j <= k <= 2^M");
  if (dense_) {
    const std::size_t n1 = n_ + 1;
    return (*dense_)[static_cast<std::size_t>(comp) * n1 * n1 + j * n1 + k];
  }
  double v = 0.0;
  for (const Term& t : terms_[static_cast<std::size_t>(comp)]) {
    const auto& x = *t.x;
    switch (t.kind) {
      case TermKind::increment:
        v += t.coef * (x[k] - x[j]);
        break;
      case TermKind::product:
        v += t.coef * ((x[k] - x[j]) * ((*t.y)[k] - (*t.y)[j]));
        break;
      case TermKind::area:
        v += t.coef * (((*t.prefix)[k] - (*t.prefix)[j]) - x[j] * ((*t.y)[k] - (*t.y)[j]));
        break;
    }
  }
  return v;
}

SimplexGrid SimplexGrid::component_grid(int comp) const {
  require(comp >= 0 && comp < ncomp_, ErrorCode::out_of_range, "grid component out of range");
  SimplexGrid g = zero(level_, 1);
  if (dense_) {
    const std::size_t n1 = n_ + 1;
    auto first = dense_->begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(comp) * n1 * n1);
    g.dense_ = std::make_shared<const std::vector<double>>(first, first + static_cast<std::ptrdiff_t>(n1 * n1));
  } else {
    g.terms_[0] = terms_[static_cast<std::size_t>(comp)];
  }
  return g;
}

SimplexGrid SimplexGrid::stack(const std::vector<SimplexGrid>& parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "stack: no grids");
  int total = 0;
  bool any_dense = false;
  for (const auto& g : parts) {
    require(g.level_ == parts.front().level_, ErrorCode::level_mismatch, "stack: levels differ");
    total += g.ncomp_;
    any_dense = any_dense || g.dense_ != nullptr;
  }
  SimplexGrid out = zero(parts.front().level_, total);
  if (any_dense) {
    std::vector<SimplexGrid> dense_parts;
    for (const auto& g : parts) dense_parts.push_back(g.materialize());
    const std::size_t n1 = out.n_ + 1;
    auto table = std::make_shared<std::vector<double>>();
    table->reserve(static_cast<std::size_t>(total) * n1 * n1);
    for (const auto& g : dense_parts) table->insert(table->end(), g.dense_->begin(), g.dense_->end());
    out.dense_ = table;
    return out;
  }
  std::size_t c = 0;
  for (const auto& g : parts)
    for (const auto& comp : g.terms_) out.terms_[c++] = comp;
  return out;
}

SimplexGrid SimplexGrid::materialize() const {
  if (dense_) return *this;
  return dense(level_, ncomp_, [&](std::size_t j, std::size_t k, double* out) {
    for (int c = 0; c < ncomp_; ++c) out[c] = value(c, j, k);
  });
}

SimplexGrid SimplexGrid::operator+(const SimplexGrid& o) const {
  require(level_ == o.level_, ErrorCode::level_mismatch, "grid +: levels differ");
  require(ncomp_ == o.ncomp_, ErrorCode::invalid_argument, "grid +: component counts differ");
  if (dense_ || o.dense_) {
    SimplexGrid a = materialize(), b = o.materialize();
    auto table = std::make_shared<std::vector<double>>(*a.dense_);
    for (std::size_t q = 0; q < table->size(); ++q) (*table)[q] += (*b.dense_)[q];
    a.dense_ = table;
    return a;
  }
  SimplexGrid g = *this;
  for (int c = 0; c < ncomp_; ++c) {
    auto& dst = g.terms_[static_cast<std::size_t>(c)];
    const auto& src = o.terms_[static_cast<std::size_t>(c)];
    dst.insert(dst.end(), src.begin(), src.end());
  }
  return g;
}

SimplexGrid SimplexGrid::operator*(double c) const {
  SimplexGrid g = *this;
  if (dense_) {
    auto table = std::make_shared<std::vector<double>>(*dense_);
    for (double& v : *table) v *= c;
    g.dense_ = table;
  } else {
    for (auto& comp : g.terms_)
      for (Term& t : comp) t.coef *= c;
  }
  return g;
}

SimplexGrid SimplexGrid::operator-(const SimplexGrid& o) const { return *this + o * -1.0; }

// --------------------------------------------------------------------- norms

namespace {

template <int P>
inline double ipow(double q) {
  if constexpr (P == 0) {
    return 1.0;
  } else if constexpr (P % 2 == 0) {
    const double r = ipow<P / 2>(q);
    return r * r;
  } else {
    return q * ipow<P - 1>(q);
  }
}

inline double ipow_runtime(double q, int p) {
  double r = 1.0;
  while (p > 0) {
    if (p & 1) r *= q;
    q *= q;
    p >>= 1;
  }
  return r;
}

// Accumulates sum_i w_i * q_i^P as scale^P * sum, rescaling by the running
// maximum so neither huge nor tiny |phi| over/underflows.
struct ScaledSum {
  double scale = 0.0;
  double sum = 0.0;
  int P = 1;

  void add_block(double block_scale, double block_sum) {
    if (block_sum == 0.0 || block_scale == 0.0) return;
    if (block_scale > scale) {
      sum = sum * ipow_runtime(scale / block_scale, P) + block_sum;
      scale = block_scale;
    } else {
      sum += block_sum * ipow_runtime(block_scale / scale, P);
    }
  }
};

// Eight independent lanes so the reduction vectorizes without reassociation
// flags; the summation order is fixed, hence bit-reproducible.
template <int P>
double weighted_power_sum(const double* q, const double* w, std::size_t len, double inv_max) {
  double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8)
    for (int l = 0; l < 8; ++l) lane[l] += w[i + l] * ipow<P>(q[i + l] * inv_max);
  double s = ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
  for (; i < len; ++i) s += w[i] * ipow<P>(q[i] * inv_max);
  return s;
}

double block_max(const double* q, std::size_t len) {
  double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8)
    for (int l = 0; l < 8; ++l) lane[l] = lane[l] > q[i + l] ? lane[l] : q[i + l];
  double m = 0.0;
  for (double v : lane) m = m > v ? m : v;
  for (; i < len; ++i) m = m > q[i] ? m : q[i];
  return m;
}

double weighted_power_sum_generic(const double* q, const double* w, std::size_t len, double inv_max, int P) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += w[i] * ipow_runtime(q[i] * inv_max, P);
  return s;
}

using PowerSumFn = double (*)(const double*, const double*, std::size_t, double);

template <int... Ps>
PowerSumFn pick_power_sum(int P, std::integer_sequence<int, Ps...>) {
  PowerSumFn fn = nullptr;
  ((P == Ps ? (fn = &weighted_power_sum<Ps>, true) : false) || ...);
  return fn;
}

}  // namespace

double besov_norm(const SimplexGrid& phi, int m, double theta) {
  require(phi.components() >= 1 && phi.size() >= 2, ErrorCode::invalid_argument, "besov_norm: empty grid");
  require(m >= 2 && m % 2 == 0, ErrorCode::invalid_argument, "besov_norm: m must be a positive even integer");
  require(theta > 0.0 && theta < 1.0, ErrorCode::invalid_argument, "besov_norm: theta must lie in (0,1)");

  const std::size_t n = phi.size() - 1;
  const double h = 1.0 / static_cast<double>(n);
  const double expo = 2.0 + m * theta;
  const int P = m / 2;
  const int nc = phi.components();

  // w[0] is the diagonal triangle (centroid rule), w[lag] the square cells.
  std::vector<double> weight(n);
  weight[0] = 0.5 * h * h * std::pow(h / 3.0, -expo);
  for (std::size_t lag = 1; lag < n; ++lag) weight[lag] = h * h * std::pow(static_cast<double>(lag) * h, -expo);

  PowerSumFn fn = pick_power_sum(P, std::make_integer_sequence<int, 41>{});

  std::vector<std::vector<double>> cur(static_cast<std::size_t>(nc), std::vector<double>(n + 1));
  std::vector<std::vector<double>> nxt(static_cast<std::size_t>(nc), std::vector<double>(n + 1));
  std::vector<double> q(n);
  for (int c = 0; c < nc; ++c) phi.row(c, 0, cur[static_cast<std::size_t>(c)].data());

  ScaledSum acc;
  acc.P = P;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t len = n - j;  // cells (j,k), k = j .. n-1; q[k-j]
    std::fill(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
    for (int c = 0; c < nc; ++c) {
      double* a = cur[static_cast<std::size_t>(c)].data();  // a[k-j]
      double* b = nxt[static_cast<std::size_t>(c)].data();  // b[k-j-1]
      phi.row(c, j + 1, b);
      const double tri = a[1] / 3.0;
      q[0] += tri * tri;
      for (std::size_t i = 1; i < len; ++i) {
        const double v = 0.25 * (a[i] + a[i + 1] + b[i - 1] + b[i]);
        q[i] += v * v;
      }
    }
    const double qmax = block_max(q.data(), len);
    if (qmax > 0.0) {
      const double inv = 1.0 / qmax;
      const double s = fn ? fn(q.data(), weight.data(), len, inv)
                          : weighted_power_sum_generic(q.data(), weight.data(), len, inv, P);
      acc.add_block(qmax, s);
    }
    std::swap(cur, nxt);
  }
  if (acc.sum == 0.0) return 0.0;
  return std::sqrt(acc.scale) * std::pow(acc.sum, 1.0 / m);
}

double hoelder_norm(const SimplexGrid& phi, double theta) {
  require(phi.components() >= 1 && phi.size() >= 2, ErrorCode::invalid_argument, "hoelder_norm: empty grid");
  require(theta > 0.0 && theta < 1.0, ErrorCode::invalid_argument, "hoelder_norm: theta must lie in (0,1)");
  const std::size_t n = phi.size() - 1;
  const double h = 1.0 / static_cast<double>(n);
  std::vector<double> inv(n + 1, 0.0);
  for (std::size_t lag = 1; lag <= n; ++lag) {
    const double r = std::pow(static_cast<double>(lag) * h, -theta);
    inv[lag] = r * r;
  }
  const int nc = phi.components();
  std::vector<double> buf(n + 1), q(n + 1);
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t len = n + 1 - j;
    std::fill(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
    for (int c = 0; c < nc; ++c) {
      phi.row(c, j, buf.data());
      for (std::size_t i = 1; i < len; ++i) q[i] += buf[i] * buf[i];
    }
    for (std::size_t i = 1; i < len; ++i) best = std::max(best, q[i] * inv[i]);
  }
  return std::sqrt(best);
}

double path_besov_norm(const SampledPath& x, int m, double theta) {
  return besov_norm(SimplexGrid::increments(x), m, theta);
}

double path_hoelder_norm(const SampledPath& x, double theta) { return hoelder_norm(SimplexGrid::increments(x), theta); }

SimplexGrid pair_product_grid(const SampledPath& x, int i, const SampledPath& y, int j) {
  if (x.level() != y.level()) fail(ErrorCode::level_mismatch, "pair_product_grid: levels differ");
  require(i >= 0 && i < x.dim() && j >= 0 && j < y.dim(), ErrorCode::out_of_range, "pair_product_grid: bad component");
  return SimplexGrid::product(x.component(i), y.component(j), x.level());
}

EmbeddingConstants estimate_embedding_constants(const std::vector<SampledPath>& batch, const BesovParams& p) {
  EmbeddingConstants out;
  std::vector<SampledPath> scalars;
  for (const auto& path : batch)
    for (int i = 0; i < path.dim(); ++i) scalars.push_back(path.component_path(i));
  std::vector<double> besov_half(scalars.size());
  for (std::size_t a = 0; a < scalars.size(); ++a) {
    besov_half[a] = path_besov_norm(scalars[a], p.m, p.theta / 2.0);
    if (besov_half[a] > 0.0)
      out.M = std::max(out.M, path_hoelder_norm(scalars[a], p.theta / 2.0) / besov_half[a]);
  }
  for (std::size_t a = 0; a < scalars.size(); ++a)
    for (std::size_t b = 0; b < scalars.size(); ++b) {
      if (a == b || scalars[a].level() != scalars[b].level()) continue;
      SimplexGrid C = SimplexGrid::area(scalars[a].component(0), scalars[b].component(0), scalars[a].level());
      const double denom = besov_norm(C, p.m, p.theta) + besov_half[a] * besov_half[b];
      if (denom > 0.0) out.N = std::max(out.N, hoelder_norm(C, p.theta) / denom);
      ++out.samples;
    }
  return out;
}

}  // namespace roughloop
