#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace roughloop {

// Philox4x32-10 (Salmon et al., SC'11). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// A (seed, stream_id) pair names an independent substream: the seed is the
// Philox key and the stream id occupies the upper counter words, so two
// streams never share a counter block.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  SeededStream substream(std::uint64_t child) const;
};

// Sequential reader over one substream.
class RandomSource {
 public:
  explicit RandomSource(SeededStream s);

  std::uint32_t next_u32();
  double uniform();        // in (0,1), 53-bit resolution
  double normal();         // Marsaglia polar method
  std::uint64_t below(std::uint64_t n);  // uniform integer in [0,n)

 private:
  void refill();

  SeededStream stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct EstimateCI {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::string method;
  double lo = 0.0;  // interval bounds at the stated level
  double hi = 0.0;
};

EstimateCI mean_estimate(const std::vector<double>& xs);
EstimateCI wilson_estimate(std::size_t successes, std::size_t n, double z = 1.959963984540054);

double median(std::vector<double> xs);

// OLS fit y = a + b x; returns b.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SlopeFit {
  double slope = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// samples[i][s] is the statistic at abscissa x[i] for seed s. Fits log2(median)
// against x, with a percentile bootstrap over seeds.
SlopeFit bootstrap_log2_median_slope(const std::vector<double>& x,
                                     const std::vector<std::vector<double>>& samples,
                                     int n_boot, SeededStream stream, double level = 0.95);

}  // namespace roughloop
