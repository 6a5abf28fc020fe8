#ifndef CANTOR_ENTROPY_HPP
#define CANTOR_ENTROPY_HPP

#include <vector>

#include "cantor/measure.hpp"

namespace cantor {

// Block entropies and per-symbol estimates. Both H_n/n and the increment
// H_{n+1}-H_n decrease monotonically toward the entropy rate; the increment
// is the faster estimator and is the one reported to users.
struct EntropyTable {
  struct Row {
    int n = 0;
    double block = 0.0;       // H_n in bits
    double per_symbol = 0.0;  // H_n / n
    double increment = 0.0;   // H_{n+1} - H_n
  };
  std::vector<Row> rows;
  // Monotonicity of the three laws, checked with 1e-9 slack.
  bool entropy_nondecreasing = true;
  bool per_symbol_nonincreasing = true;
  bool increments_nonincreasing = true;
};

// H_n = -sum_{|w|=n} mu[w] log2 mu[w] by exhaustive enumeration with
// incremental one-bit cylinder extensions. 1 <= n <= 26; BudgetExceeded
// above. Terms below 2^-1000 are treated as zero.
double block_entropy(const MeasureModel& m, int n);

// H_1 .. H_n in one sweep of the depth-n binary tree.
std::vector<double> block_entropy_sweep(const MeasureModel& m, int n);

// Rows for n = 1..n_max (needs H_{n_max+1}; n_max <= 25).
EntropyTable entropy_rate_table(const MeasureModel& m, int n_max);

// Bernoulli: -p log2 p - (1-p) log2(1-p). Markov: -sum_a pi_a sum_b P_ab
// log2 P_ab. Throws NoClosedForm for hidden-Markov and mixture models.
double closed_form_entropy(const MeasureModel& m);

}  // namespace cantor

#endif
