#include "cantor/entropy.hpp"

#include <string>

#include "cantor/errors.hpp"
#include "cantor/numeric.hpp"

namespace cantor {

namespace {

constexpr int kMaxBlock = 26;
constexpr double kDropBelow = -1000.0;  // log2 threshold for negligible terms

void sweep_dfs(CylinderEval ev, int depth, int n,
               std::vector<CompensatedSum>& H) {
  const LogProb ext0 = ev.extend_logp(0);
  const LogProb ext1 = ev.extend_logp(1);
  const bool keep0 = !ext0.is_null() && ext0.v >= kDropBelow;
  const bool keep1 = !ext1.is_null() && ext1.v >= kDropBelow;
  if (keep0) H[depth + 1].add(-ext0.linear() * ext0.v);
  if (keep1) H[depth + 1].add(-ext1.linear() * ext1.v);
  if (depth + 1 >= n) return;
  if (keep0) {
    CylinderEval left = ev;
    left.push(0);
    sweep_dfs(std::move(left), depth + 1, n, H);
  }
  if (keep1) {
    ev.push(1);
    sweep_dfs(std::move(ev), depth + 1, n, H);
  }
}

void check_block_budget(int n) {
  if (n < 1) throw BudgetExceeded("block length must be at least 1");
  if (n > kMaxBlock) {
    throw BudgetExceeded("block length " + std::to_string(n) +
                         " exceeds the enumeration cap of " +
                         std::to_string(kMaxBlock));
  }
}

}  // namespace

std::vector<double> block_entropy_sweep(const MeasureModel& m, int n) {
  check_block_budget(n);
  std::vector<CompensatedSum> H(static_cast<std::size_t>(n) + 1);
  sweep_dfs(CylinderEval(m), 0, n, H);
  std::vector<double> out;
  out.reserve(n);
  for (int d = 1; d <= n; ++d) out.push_back(H[d].value());
  return out;
}

double block_entropy(const MeasureModel& m, int n) {
  return block_entropy_sweep(m, n).back();
}

EntropyTable entropy_rate_table(const MeasureModel& m, int n_max) {
  if (n_max < 1 || n_max > kMaxBlock - 1) {
    throw BudgetExceeded("entropy table depth must lie in [1, " +
                         std::to_string(kMaxBlock - 1) + "]");
  }
  const auto H = block_entropy_sweep(m, n_max + 1);  // H[0] is H_1
  EntropyTable t;
  t.rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    EntropyTable::Row r;
    r.n = n;
    r.block = H[n - 1];
    r.per_symbol = H[n - 1] / n;
    r.increment = H[n] - H[n - 1];
    t.rows.push_back(r);
  }
  constexpr double slack = 1e-9;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.rows[i].block < t.rows[i - 1].block - slack) {
      t.entropy_nondecreasing = false;
    }
    if (t.rows[i].per_symbol > t.rows[i - 1].per_symbol + slack) {
      t.per_symbol_nonincreasing = false;
    }
    if (t.rows[i].increment > t.rows[i - 1].increment + slack) {
      t.increments_nonincreasing = false;
    }
  }
  return t;
}

double closed_form_entropy(const MeasureModel& m) {
  if (const auto* b = m.get_if<Bernoulli>()) {
    return nlog2n(b->p) + nlog2n(1.0 - b->p);
  }
  if (const auto* mk = m.get_if<Markov>()) {
    double h = 0.0;
    for (int a = 0; a < 2; ++a) {
      h += mk->pi[a] * (nlog2n(mk->P[a][0]) + nlog2n(mk->P[a][1]));
    }
    return h;
  }
  throw NoClosedForm("entropy rate of " + m.id() +
                     " has no closed form; use entropy_rate_table");
}

}  // namespace cantor
