#include "roughloop/random.hpp"

#include <algorithm>
#include <cmath>

#include "roughloop/error.hpp"

namespace roughloop {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

SeededStream SeededStream::substream(std::uint64_t child) const {
  return SeededStream{seed, splitmix64(stream_id ^ splitmix64(child + 0x632BE59BD9B4E019ull))};
}

RandomSource::RandomSource(SeededStream s) : stream_(s) {}

void RandomSource::refill() {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_.stream_id), static_cast<std::uint32_t>(stream_.stream_id >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(stream_.seed),
                                            static_cast<std::uint32_t>(stream_.seed >> 32)};
  buf_ = philox4x32(ctr, key);
  ++block_;
  pos_ = 0;
}

std::uint32_t RandomSource::next_u32() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

double RandomSource::uniform() {
  const std::uint32_t a = next_u32() >> 5;
  const std::uint32_t b = next_u32() >> 6;
  return (a * 67108864.0 + b + 0.5) / 9007199254740992.0;
}

double RandomSource::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

std::uint64_t RandomSource::below(std::uint64_t n) {
  require(n > 0, ErrorCode::invalid_argument, "below: n must be positive");
  // Lemire's multiply-shift with rejection, on 64-bit draws.
  for (;;) {
    const std::uint64_t x = (static_cast<std::uint64_t>(next_u32()) << 32) | next_u32();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    const std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low >= n || low >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
  }
}

EstimateCI mean_estimate(const std::vector<double>& xs) {
  require(!xs.empty(), ErrorCode::invalid_argument, "mean_estimate: no samples");
  EstimateCI e;
  e.n = xs.size();
  e.method = "normal";
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(e.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.std_error = e.n > 1 ? std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n)) : 0.0;
  e.lo = e.mean - 1.959963984540054 * e.std_error;
  e.hi = e.mean + 1.959963984540054 * e.std_error;
  return e;
}

EstimateCI wilson_estimate(std::size_t successes, std::size_t n, double z) {
  require(n > 0, ErrorCode::invalid_argument, "wilson_estimate: n must be positive");
  require(successes <= n, ErrorCode::invalid_argument, "wilson_estimate: successes exceed n");
  EstimateCI e;
  e.n = n;
  e.method = "wilson";
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  e.mean = p;
  e.std_error = std::sqrt(p * (1.0 - p) / nn);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  e.lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  e.hi = successes == n ? 1.0 : std::min(1.0, center + half);
  return e;
}

double median(std::vector<double> xs) {
  require(!xs.empty(), ErrorCode::invalid_argument, "median: no samples");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::invalid_argument, "ols_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, ErrorCode::invalid_argument, "ols_slope: abscissae are all equal");
  return sxy / sxx;
}

SlopeFit bootstrap_log2_median_slope(const std::vector<double>& x,
                                     const std::vector<std::vector<double>>& samples,
                                     int n_boot, SeededStream stream, double level) {
  require(x.size() == samples.size() && x.size() >= 2, ErrorCode::invalid_argument,
          "bootstrap: one sample vector per abscissa, at least two");
  const std::size_t n = samples.front().size();
  for (const auto& s : samples)
    require(s.size() == n && n > 0, ErrorCode::invalid_argument, "bootstrap: ragged sample table");
  require(n_boot >= 1, ErrorCode::invalid_argument, "bootstrap: n_boot must be positive");

  auto fit = [&](const std::vector<std::size_t>* idx) {
    std::vector<double> y(x.size());
    std::vector<double> buf(n);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t s = 0; s < n; ++s) buf[s] = samples[i][idx ? (*idx)[s] : s];
      y[i] = std::log2(median(buf));
    }
    return ols_slope(x, y);
  };

  SlopeFit out;
  out.slope = fit(nullptr);
  RandomSource rng(stream);
  std::vector<double> boots(static_cast<std::size_t>(n_boot));
  std::vector<std::size_t> idx(n);
  for (auto& b : boots) {
    for (auto& k : idx) k = rng.below(n);
    b = fit(&idx);
  }
  std::sort(boots.begin(), boots.end());
  const double tail = 0.5 * (1.0 - level);
  const auto pick = [&](double q) {
    const double pos = q * static_cast<double>(n_boot - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, boots.size() - 1);
    return boots[i] + (pos - static_cast<double>(i)) * (boots[j] - boots[i]);
  };
  out.lo = pick(tail);
  out.hi = pick(1.0 - tail);
  return out;
}

}  // namespace roughloop
