#ifndef CANTOR_NUMERIC_HPP
#define CANTOR_NUMERIC_HPP

#include <cmath>
#include <cstdint>

namespace cantor {

// Neumaier compensated accumulator. Keeps long sums of log-probabilities
// accurate to a few ulps of the total instead of growing with the term count.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }
  void reset() { sum_ = comp_ = 0.0; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Streaming mean / standard error (Welford). Standard error uses the
// sample standard deviation (n-1 denominator) over sqrt(n).
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
  double stderror() const {
    return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// -p*log2(p) with the 0*log(0) = 0 convention.
inline double nlog2n(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace cantor

#endif
