#ifndef CANTOR_SMB_HPP
#define CANTOR_SMB_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cantor/measure.hpp"
#include "cantor/report.hpp"
#include "cantor/word.hpp"

namespace cantor {

// Conditional informations of one prefix: values[k] is the information of
// the first symbol given the next k, in bits. For first-order chains the
// values are constant from k = 1 on; in general they stabilize pathwise
// without a computable rate, so the limit is reported as values[K] together
// with a stability window.
struct FkProfile {
  BinaryWord x_prefix;         // the K+1 bits the profile was computed from
  std::vector<double> values;  // f_0 .. f_K
  double f_star = 0.0;         // max over k <= K
  double f_limit_estimate = 0.0;
  int stability_window = 0;
  bool stable = false;
};

// values[k] = log2 mu[x_1..x_k] - log2 mu[x_0..x_k] for k >= 1, and
// -log2 mu[x_0] at k = 0. Requires |x| >= K+1 and positive conditioning
// cylinders (ConditioningOnNull otherwise).
std::vector<double> fk_values(const MeasureModel& m, BitSpan x, int K);

FkProfile fk_profile(const MeasureModel& m, BitSpan x, int K,
                     int stability_window = 16, double stability_tol = 1e-6);

// Betting-strategy values along the prefix, reported as log2 d. Index L is
// the prefix of length L: d(empty) = 2, d(x_0) = 1/mu[x_0], and
// d(x_0..x_k) = mu[x_1..x_k]/mu[x_0..x_k]. Each prefix is evaluated afresh,
// so agreement with fk_values is a genuine two-route check:
// log2 d(x_0..x_k) = f_k(x) to within accumulated rounding.
std::vector<double> martingale_values(const MeasureModel& m, BitSpan x, int K);

// | -log2 mu[x|n] - sum_{k<n} f_{n-1-k}(T^k x) |. The identity telescopes
// exactly; the residual is pure floating point and must stay below
// 1e-8 * max(1, n/1000). Each term is evaluated from its own suffix window;
// Bernoulli and Markov models use the closed conditional (f_j constant
// beyond j = 1), everything else pays one window scan per term.
double decomposition_residual(const MeasureModel& m, BitSpan x, std::uint64_t n);

// Rows (n, -(1/n) log2 mu[x|n], h target) over the grid. The target is the
// closed-form rate when the family has one and otherwise a block-entropy
// increment upper estimate, flagged in metadata. For non-ergodic models a
// per-sequence limit is a component rate, so that flag matters.
ConvergenceReport log_prob_rate(const MeasureModel& m, BitSpan x,
                                const std::vector<std::uint64_t>& n_grid);

// Finite union of cylinders, reduced to a disjoint antichain (words that
// contain another as a prefix are dropped). The only effectively closed
// sets with finitely checkable membership used by the visit-time and
// visit-frequency operations.
class CylinderUnion {
 public:
  explicit CylinderUnion(std::vector<BinaryWord> words);
  const std::vector<BinaryWord>& words() const { return words_; }
  double measure(const MeasureModel& m) const;
  bool matches_at(BitSpan x, std::size_t pos) const;
  std::size_t max_length() const { return max_len_; }

 private:
  std::vector<BinaryWord> words_;
  std::size_t max_len_ = 0;
};

// Visit frequency of the cylinder [u] along the orbit: rows
// (m, (1/m) #{k<m : x matches u at k}, mu[u]) on a geometric grid up to n.
ConvergenceReport birkhoff_average(const MeasureModel& m, BitSpan x, BitSpan u,
                                   std::uint64_t n);
ConvergenceReport birkhoff_average(const MeasureModel& m, BitSpan x,
                                   const CylinderUnion& c, std::uint64_t n);

// Least k <= budget with a match at k, or nullopt. Requires
// budget + |u| <= |x| so every candidate window is readable.
std::optional<std::uint64_t> first_return(BitSpan x, BitSpan u,
                                          std::uint64_t budget);
std::optional<std::uint64_t> first_return(BitSpan x, const CylinderUnion& c,
                                          std::uint64_t budget);

struct GtildeReport {
  ConvergenceReport report;  // rows (N, mean gtilde_N^(K), target 0) + stderr
  bool pathwise_nonincreasing = true;
  int K = 0;
};

// Monte Carlo means of gtilde_N^(K)(x) = max_{N <= k,j <= K} |f_k - f_j|,
// the truncated-sup oscillation diagnostic. The truncation at K is recorded
// in the report metadata. Pathwise the value is exactly nonincreasing in N.
GtildeReport gtilde_diagnostic(const MeasureModel& m,
                               const std::vector<int>& N_grid, int K,
                               std::uint64_t n_samples, std::uint64_t n_prefix,
                               std::uint64_t seed);

struct FStarEstimate {
  double mean = 0.0;
  double stderror = 0.0;
  std::uint64_t samples = 0;
  int K = 0;
};

// Monte Carlo mean of max_{k <= K} f_k over sampled sequences; nondecreasing
// in K and expected to plateau (the empirical integrability witness).
FStarEstimate fstar_integral_estimate(const MeasureModel& m, int K,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed);

}  // namespace cantor

#endif
