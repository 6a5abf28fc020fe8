#ifndef CANTOR_LOGPROB_HPP
#define CANTOR_LOGPROB_HPP

#include <cmath>
#include <compare>
#include <limits>

namespace cantor {

// Base-2 log of a probability. Value lies in [-inf, 0]; -inf encodes
// probability zero. All probability arithmetic in the library happens in
// this representation; exponentiation back to linear scale is reserved for
// quantities with |value| small enough not to underflow.
struct LogProb {
  double v = 0.0;

  constexpr LogProb() = default;
  constexpr explicit LogProb(double value) : v(value) {}

  static constexpr LogProb one() { return LogProb{0.0}; }
  static constexpr LogProb null() {
    return LogProb{-std::numeric_limits<double>::infinity()};
  }

  constexpr bool is_null() const { return std::isinf(v) && v < 0; }

  // exp2 of the value; underflows to 0 for v below about -1074.
  double linear() const { return std::exp2(v); }

  // Product of probabilities.
  constexpr LogProb operator+(LogProb o) const { return LogProb{v + o.v}; }
  constexpr LogProb& operator+=(LogProb o) {
    v += o.v;
    return *this;
  }

  auto operator<=>(const LogProb&) const = default;
};

// log2(2^a + 2^b) without underflow; exact absorption of null terms.
// Safe for |a|, |b| up to at least 1e7.
inline LogProb log_sum_exp(LogProb a, LogProb b) {
  if (a.is_null()) return b;
  if (b.is_null()) return a;
  const double hi = a.v > b.v ? a.v : b.v;
  const double lo = a.v > b.v ? b.v : a.v;
  // log2(1+t) = log1p(t)/ln 2; exp2(lo-hi) flushes to 0 when irrelevant.
  return LogProb{hi + std::log1p(std::exp2(lo - hi)) / M_LN2};
}

}  // namespace cantor

#endif
