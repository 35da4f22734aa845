#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace pinning {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Online log-sum-exp: add terms by their logarithm, read off log of the sum.
// Keeps a running maximum and rescales, so any mix of magnitudes is safe.
class LogAccumulator {
 public:
  void add_log(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  double log_sum() const {
    if (sum_ == 0.0) return kNegInf;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

double log_sum_exp(const std::vector<double>& log_terms);

// Runs fn(i) for i in [0, n) on `width` threads, block-partitioned.
// Results must be written to per-index slots by the caller; the schedule is
// deterministic and independent of width.
void parallel_for(std::size_t n, unsigned width, const std::function<void(std::size_t)>& fn);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation
  double stderr_ = 0.0; // sd / sqrt(n)
  std::size_t n = 0;
};
MeanSd mean_sd(const std::vector<double>& xs);

// Ordinary least squares y ~ intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// FNV-1a over a byte string; hex form used to name result files.
uint64_t fnv1a64(const std::string& bytes);
std::string hex16(uint64_t v);

// Locale-independent %.17g (round-trip exact for doubles).
std::string format_g17(double v);

}  // namespace pinning
