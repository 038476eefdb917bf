#pragma once

#include <cstdint>

namespace exest {

// Quantile of the standard normal distribution, p in (0,1).
// normal_quantile(0.95) = 1.6448536... is the 90% two-sided width factor.
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Single-pass mean/variance accumulator (Welford). Merging is done by
// feeding values in replicate-index order, which keeps results identical
// for any worker count.
class RunningMoments {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace exest
