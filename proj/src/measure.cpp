#include "cantor/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "cantor/errors.hpp"
#include "cantor/report.hpp"
#include "cantor/sampler.hpp"

namespace cantor {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kStationaryTol = 1e-10;

double safe_log2(double p) {
  return p > 0.0 ? std::log2(p)
                 : -std::numeric_limits<double>::infinity();
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidModel(msg);
}

void check_prob_vector(const std::vector<double>& v, const std::string& what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] >= 0.0 && v[i] <= 1.0 && std::isfinite(v[i]),
            what + " entry " + std::to_string(i) + " is not a probability");
    sum += v[i];
  }
  std::ostringstream os;
  os << what << " sums to " << sum;
  require(std::abs(sum - 1.0) < kSumTol, os.str());
}

double stationarity_residual_2(const std::array<double, 2>& pi,
                               const std::array<std::array<double, 2>, 2>& P) {
  double r0 = pi[0] * P[0][0] + pi[1] * P[1][0] - pi[0];
  double r1 = pi[0] * P[0][1] + pi[1] * P[1][1] - pi[1];
  return std::max(std::abs(r0), std::abs(r1));
}

double stationarity_residual_m(const std::vector<double>& pi, const Matrix& Q) {
  double worst = 0.0;
  for (std::size_t j = 0; j < Q.n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < Q.n; ++i) s += pi[i] * Q.at(i, j);
    worst = std::max(worst, std::abs(s - pi[j]));
  }
  return worst;
}

void validate_markov_structure(const std::array<double, 2>& pi,
                               const std::array<std::array<double, 2>, 2>& P) {
  check_prob_vector({pi[0], pi[1]}, "start distribution");
  for (int i = 0; i < 2; ++i) {
    check_prob_vector({P[i][0], P[i][1]},
                      "transition matrix row " + std::to_string(i));
  }
}

void validate_hmm_structure(const std::vector<double>& pi, const Matrix& Q,
                            const std::vector<std::uint8_t>& emit) {
  require(Q.n >= 1, "hidden transition matrix is empty");
  require(pi.size() == Q.n, "hidden start distribution has wrong length");
  require(emit.size() == Q.n, "emission map has wrong length");
  for (auto e : emit) require(e == 0 || e == 1, "emission values must be 0 or 1");
  check_prob_vector(pi, "hidden start distribution");
  for (std::size_t i = 0; i < Q.n; ++i) {
    std::vector<double> row(Q.n);
    for (std::size_t j = 0; j < Q.n; ++j) row[j] = Q.at(i, j);
    check_prob_vector(row, "hidden transition matrix row " + std::to_string(i));
  }
}

}  // namespace

MeasureModel::MeasureModel(Variant v, std::string id)
    : v_(std::move(v)), id_(std::move(id)) {}

MeasureModel MeasureModel::bernoulli(double p, std::string id) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
          "bernoulli parameter must lie in [0,1]");
  return MeasureModel(Bernoulli{p}, std::move(id));
}

MeasureModel MeasureModel::markov(const std::array<std::array<double, 2>, 2>& P,
                                  std::string id) {
  Matrix M(2);
  M.at(0, 0) = P[0][0];
  M.at(0, 1) = P[0][1];
  M.at(1, 0) = P[1][0];
  M.at(1, 1) = P[1][1];
  for (int i = 0; i < 2; ++i) {
    check_prob_vector({P[i][0], P[i][1]},
                      "transition matrix row " + std::to_string(i));
  }
  auto pi = stationary_distribution(M);
  return markov({pi[0], pi[1]}, P, std::move(id));
}

MeasureModel MeasureModel::markov(const std::array<double, 2>& pi,
                                  const std::array<std::array<double, 2>, 2>& P,
                                  std::string id) {
  validate_markov_structure(pi, P);
  const double res = stationarity_residual_2(pi, P);
  if (res >= kStationaryTol) {
    std::ostringstream os;
    os << "start distribution is not stationary (residual " << res
       << "); use markov_with_start for diagnostic models";
    throw InvalidModel(os.str());
  }
  return MeasureModel(Markov{pi, P}, std::move(id));
}

MeasureModel MeasureModel::markov_with_start(
    const std::array<double, 2>& pi,
    const std::array<std::array<double, 2>, 2>& P, std::string id) {
  validate_markov_structure(pi, P);
  return MeasureModel(Markov{pi, P}, std::move(id));
}

MeasureModel MeasureModel::hidden_markov(const Matrix& Q,
                                         const std::vector<std::uint8_t>& emit,
                                         std::string id) {
  auto pi = stationary_distribution(Q);
  return hidden_markov(pi, Q, emit, std::move(id));
}

MeasureModel MeasureModel::hidden_markov(const std::vector<double>& pi,
                                         const Matrix& Q,
                                         const std::vector<std::uint8_t>& emit,
                                         std::string id) {
  validate_hmm_structure(pi, Q, emit);
  return MeasureModel(HiddenMarkov{pi, Q, emit}, std::move(id));
}

MeasureModel MeasureModel::mixture(const std::vector<double>& weights,
                                   std::vector<MeasureModel> components,
                                   std::string id) {
  require(!components.empty(), "mixture needs at least one component");
  require(weights.size() == components.size(),
          "mixture weights and components differ in length");
  check_prob_vector(weights, "mixture weights");
  for (std::size_t i = 0; i < components.size(); ++i) {
    require(components[i].get_if<Mixture>() == nullptr,
            "mixture component " + std::to_string(i) +
                " is itself a mixture; depth is capped at 1");
  }
  return MeasureModel(Mixture{weights, std::move(components)}, std::move(id));
}

// --- CylinderEval ---------------------------------------------------------

CylinderEval::BernoulliState::BernoulliState() = default;
CylinderEval::MarkovState::MarkovState() = default;
CylinderEval::HmmState::HmmState() = default;
CylinderEval::MixtureState::MixtureState() = default;

CylinderEval::CylinderEval(const MeasureModel& m) : model_(&m) {
  if (m.get_if<Bernoulli>()) {
    st_ = BernoulliState{};
  } else if (m.get_if<Markov>()) {
    st_ = MarkovState{};
  } else if (const auto* h = m.get_if<HiddenMarkov>()) {
    HmmState s;
    s.alpha = h->pi;
    st_ = std::move(s);
  } else {
    const auto* mix = m.get_if<Mixture>();
    MixtureState s;
    s.comps.reserve(mix->components.size());
    for (const auto& c : mix->components) s.comps.emplace_back(c);
    st_ = std::move(s);
  }
}

LogProb CylinderEval::logp() const {
  if (const auto* b = std::get_if<BernoulliState>(&st_)) {
    const auto& par = *model_->get_if<Bernoulli>();
    double v = 0.0;
    if (b->ones > 0) v += static_cast<double>(b->ones) * safe_log2(par.p);
    if (b->zeros > 0) v += static_cast<double>(b->zeros) * safe_log2(1.0 - par.p);
    return LogProb{v};
  }
  if (const auto* mk = std::get_if<MarkovState>(&st_)) {
    if (mk->null) return LogProb::null();
    return LogProb{mk->acc.value()};
  }
  if (const auto* h = std::get_if<HmmState>(&st_)) {
    if (h->null) return LogProb::null();
    return LogProb{h->acc.value()};
  }
  const auto& mixst = std::get<MixtureState>(st_);
  const auto* mix = model_->get_if<Mixture>();
  LogProb acc = LogProb::null();
  for (std::size_t i = 0; i < mixst.comps.size(); ++i) {
    acc = log_sum_exp(
        acc, LogProb{safe_log2(mix->weights[i])} + mixst.comps[i].logp());
  }
  return acc;
}

LogProb CylinderEval::extend_logp(std::uint8_t bit) const {
  if (const auto* b = std::get_if<BernoulliState>(&st_)) {
    const auto& par = *model_->get_if<Bernoulli>();
    const std::uint64_t ones = b->ones + (bit ? 1 : 0);
    const std::uint64_t zeros = b->zeros + (bit ? 0 : 1);
    double v = 0.0;
    if (ones > 0) v += static_cast<double>(ones) * safe_log2(par.p);
    if (zeros > 0) v += static_cast<double>(zeros) * safe_log2(1.0 - par.p);
    return LogProb{v};
  }
  if (const auto* mk = std::get_if<MarkovState>(&st_)) {
    if (mk->null) return LogProb::null();
    const auto& par = *model_->get_if<Markov>();
    const double step = mk->last < 0 ? par.pi[bit] : par.P[mk->last][bit];
    if (step <= 0.0) return LogProb::null();
    return LogProb{mk->acc.value() + safe_log2(step)};
  }
  if (const auto* h = std::get_if<HmmState>(&st_)) {
    if (h->null) return LogProb::null();
    const auto& par = *model_->get_if<HiddenMarkov>();
    const std::size_t n = par.Q.n;
    double p = 0.0;
    if (len_ == 0) {
      for (std::size_t s = 0; s < n; ++s) {
        if (par.emit[s] == bit) p += h->alpha[s];
      }
    } else {
      for (std::size_t t = 0; t < n; ++t) {
        if (par.emit[t] != bit) continue;
        double w = 0.0;
        for (std::size_t s = 0; s < n; ++s) w += h->alpha[s] * par.Q.at(s, t);
        p += w;
      }
    }
    if (p <= 0.0) return LogProb::null();
    return LogProb{h->acc.value() + std::log2(p)};
  }
  const auto& mixst = std::get<MixtureState>(st_);
  const auto* mix = model_->get_if<Mixture>();
  LogProb acc = LogProb::null();
  for (std::size_t i = 0; i < mixst.comps.size(); ++i) {
    acc = log_sum_exp(acc, LogProb{safe_log2(mix->weights[i])} +
                               mixst.comps[i].extend_logp(bit));
  }
  return acc;
}

void CylinderEval::push(std::uint8_t bit) {
  if (auto* b = std::get_if<BernoulliState>(&st_)) {
    if (bit) {
      ++b->ones;
    } else {
      ++b->zeros;
    }
  } else if (auto* mk = std::get_if<MarkovState>(&st_)) {
    if (!mk->null) {
      const auto& par = *model_->get_if<Markov>();
      const double step = mk->last < 0 ? par.pi[bit] : par.P[mk->last][bit];
      if (step <= 0.0) {
        mk->null = true;
      } else {
        mk->acc.add(safe_log2(step));
      }
    }
    mk->last = bit;
  } else if (auto* h = std::get_if<HmmState>(&st_)) {
    if (!h->null) {
      const auto& par = *model_->get_if<HiddenMarkov>();
      const std::size_t n = par.Q.n;
      std::vector<double> raw(n, 0.0);
      double p = 0.0;
      if (len_ == 0) {
        for (std::size_t s = 0; s < n; ++s) {
          raw[s] = par.emit[s] == bit ? h->alpha[s] : 0.0;
          p += raw[s];
        }
      } else {
        for (std::size_t t = 0; t < n; ++t) {
          if (par.emit[t] != bit) continue;
          double w = 0.0;
          for (std::size_t s = 0; s < n; ++s) w += h->alpha[s] * par.Q.at(s, t);
          raw[t] = w;
          p += w;
        }
      }
      if (p <= 0.0) {
        h->null = true;
      } else {
        h->acc.add(std::log2(p));
        for (std::size_t s = 0; s < n; ++s) h->alpha[s] = raw[s] / p;
      }
    }
  } else {
    auto& mixst = std::get<MixtureState>(st_);
    for (auto& c : mixst.comps) c.push(bit);
  }
  ++len_;
}

void CylinderEval::push_all(BitSpan bits) {
  for (auto b : bits) push(b);
}

// --- Operations -----------------------------------------------------------

LogProb log_cylinder(const MeasureModel& m, BitSpan w) {
  CylinderEval ev(m);
  ev.push_all(w);
  return ev.logp();
}

LogProb conditional_next_logprob(const MeasureModel& m, BitSpan w,
                                 std::uint8_t bit) {
  CylinderEval ev(m);
  ev.push_all(w);
  const LogProb base = ev.logp();
  if (base.is_null()) {
    throw ConditioningOnNull("conditioning cylinder has measure zero");
  }
  const LogProb ext = ev.extend_logp(bit);
  if (ext.is_null()) return LogProb::null();
  // The ratio may exceed 1 by a rounding hair; clamp to a valid LogProb.
  return LogProb{std::min(ext.v - base.v, 0.0)};
}

std::vector<double> stationary_distribution(const Matrix& P) {
  const std::size_t n = P.n;
  if (n == 0) throw InvalidModel("empty transition matrix");
  constexpr double kResidualTol = 1e-12;

  if (n <= 8) {
    // Solve pi (P - I) = 0 with the last column replaced by normalization.
    // Transposed system A x = b with A = (P - I)^T, last row of ones.
    std::vector<double> A(n * n);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        A[i * n + j] = P.at(j, i) - (i == j ? 1.0 : 0.0);
      }
    }
    for (std::size_t j = 0; j < n; ++j) A[(n - 1) * n + j] = 1.0;
    b[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r) {
        if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
      }
      if (std::abs(A[piv * n + col]) < 1e-300) {
        throw NonConvergence("singular stationary system (reducible chain?)");
      }
      if (piv != col) {
        for (std::size_t j = 0; j < n; ++j) std::swap(A[piv * n + j], A[col * n + j]);
        std::swap(b[piv], b[col]);
      }
      for (std::size_t r = col + 1; r < n; ++r) {
        const double f = A[r * n + col] / A[col * n + col];
        if (f == 0.0) continue;
        for (std::size_t j = col; j < n; ++j) A[r * n + j] -= f * A[col * n + j];
        b[r] -= f * b[col];
      }
    }
    std::vector<double> pi(n);
    for (std::size_t ri = n; ri-- > 0;) {
      double s = b[ri];
      for (std::size_t j = ri + 1; j < n; ++j) s -= A[ri * n + j] * pi[j];
      pi[ri] = s / A[ri * n + ri];
    }
    // Clean tiny negatives from elimination and renormalize.
    double sum = 0.0;
    for (auto& x : pi) {
      if (x < 0.0 && x > -1e-12) x = 0.0;
      sum += x;
    }
    for (auto& x : pi) x /= sum;

    double res = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += pi[i] * P.at(i, j);
      res = std::max(res, std::abs(s - pi[j]));
    }
    if (res >= kResidualTol) {
      throw NonConvergence("stationary solve residual " + format_double(res));
    }
    return pi;
  }

  // Power iteration for larger chains.
  constexpr double kIterTol = 1e-13;
  constexpr std::uint64_t kMaxIter = 1000000;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::uint64_t it = 0; it < kMaxIter; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += pi[i] * P.at(i, j);
      next[j] = s;
    }
    double delta = 0.0, sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += next[j];
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= sum;
      delta = std::max(delta, std::abs(next[j] - pi[j]));
    }
    pi.swap(next);
    if (delta < kIterTol) {
      double res = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += pi[i] * P.at(i, j);
        res = std::max(res, std::abs(s - pi[j]));
      }
      if (res < 1e-12) return pi;
    }
  }
  throw NonConvergence(
      "power iteration did not reach tolerance (reducible or periodic chain?)");
}

int chain_period(const Matrix& P) {
  const std::size_t n = P.n;
  // Strong connectivity via forward and backward reachability from 0.
  auto reach = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n; ++v) {
        const double w = transpose ? P.at(v, u) : P.at(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    return seen;
  };
  const auto fwd = reach(false), bwd = reach(true);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fwd[i] || !bwd[i]) return 0;
  }
  // gcd of (level[u] + 1 - level[v]) over positive edges u -> v.
  std::vector<std::int64_t> level(n, -1);
  std::queue<std::size_t> q;
  q.push(0);
  level[0] = 0;
  std::int64_t g = 0;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (P.at(u, v) <= 0.0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 1 : static_cast<int>(g);
}

namespace {

Matrix markov_matrix(const Markov& mk) {
  Matrix M(2);
  M.at(0, 0) = mk.P[0][0];
  M.at(0, 1) = mk.P[0][1];
  M.at(1, 0) = mk.P[1][0];
  M.at(1, 1) = mk.P[1][1];
  return M;
}

void validate_into(const MeasureModel& m, CheckReport& rep,
                   const std::string& prefix) {
  if (m.get_if<Bernoulli>()) return;
  if (const auto* mk = m.get_if<Markov>()) {
    const double res = stationarity_residual_2(mk->pi, mk->P);
    rep.worst_violation = std::max(rep.worst_violation, res);
    if (res >= kStationaryTol) {
      rep.passed = false;
      rep.worst_item = prefix + "start distribution (stationarity residual " +
                       format_double(res) + ")";
    }
    const int period = chain_period(markov_matrix(*mk));
    if (period == 0) {
      rep.warnings.push_back(prefix + "transition graph is not strongly connected");
    } else if (period > 1) {
      rep.warnings.push_back(prefix + "periodic transition graph (period " +
                             std::to_string(period) + ")");
    }
    return;
  }
  if (const auto* h = m.get_if<HiddenMarkov>()) {
    const double res = stationarity_residual_m(h->pi, h->Q);
    rep.worst_violation = std::max(rep.worst_violation, res);
    if (res >= kStationaryTol) {
      rep.passed = false;
      rep.worst_item = prefix + "hidden start distribution (residual " +
                       format_double(res) + ")";
    }
    const int period = chain_period(h->Q);
    if (period == 0) {
      rep.warnings.push_back(prefix + "hidden graph is not strongly connected");
    } else if (period > 1) {
      rep.warnings.push_back(prefix + "periodic hidden graph (period " +
                             std::to_string(period) + ")");
    }
    return;
  }
  const auto* mix = m.get_if<Mixture>();
  if (mix->components.size() > 1) {
    rep.warnings.push_back(prefix +
                           "mixture of distinct components is not ergodic");
  }
  for (std::size_t i = 0; i < mix->components.size(); ++i) {
    validate_into(mix->components[i], rep,
                  prefix + "component " + std::to_string(i) + ": ");
  }
}

}  // namespace

CheckReport validate(const MeasureModel& m) {
  CheckReport rep;
  rep.tolerance = kStationaryTol;
  rep.items_checked = 1;
  validate_into(m, rep, "");
  return rep;
}

CheckReport check_shift_invariance(const MeasureModel& m, int depth,
                                   double tol) {
  if (depth > 22) {
    throw BudgetExceeded("shift-invariance depth capped at 22, got " +
                         std::to_string(depth));
  }
  if (depth < 0) throw std::invalid_argument("negative depth");

  CheckReport rep;
  rep.tolerance = tol;
  std::string w;

  // Three synchronized evaluators: for w, 0w and 1w. Appending a bit to w
  // appends the same bit to all three.
  struct Frame {
    CylinderEval ev, ev0, ev1;
  };
  auto check = [&](const Frame& f) {
    const double mu = f.ev.logp().linear();
    const double split = log_sum_exp(f.ev0.logp(), f.ev1.logp()).linear();
    const double viol = std::abs(split - mu);
    ++rep.items_checked;
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.worst_item = w.empty() ? "(empty)" : w;
    }
  };

  auto dfs = [&](auto&& self, Frame f, int remaining) -> void {
    check(f);
    if (remaining == 0) return;
    {
      Frame left = f;
      left.ev.push(0);
      left.ev0.push(0);
      left.ev1.push(0);
      w.push_back('0');
      self(self, std::move(left), remaining - 1);
      w.pop_back();
    }
    f.ev.push(1);
    f.ev0.push(1);
    f.ev1.push(1);
    w.push_back('1');
    self(self, std::move(f), remaining - 1);
    w.pop_back();
  };

  Frame root{CylinderEval(m), CylinderEval(m), CylinderEval(m)};
  root.ev0.push(0);
  root.ev1.push(1);
  dfs(dfs, std::move(root), depth);

  rep.passed = rep.worst_violation < tol;
  const auto model_warnings = validate(m).warnings;
  rep.warnings.insert(rep.warnings.end(), model_warnings.begin(),
                      model_warnings.end());
  return rep;
}

// --- Cesaro correlation ---------------------------------------------------

namespace {

bool has_exact_correlation(const MeasureModel& m) {
  if (m.get_if<Bernoulli>() || m.get_if<Markov>()) return true;
  if (const auto* mix = m.get_if<Mixture>()) {
    for (const auto& c : mix->components) {
      if (!c.get_if<Bernoulli>() && !c.get_if<Markov>()) return false;
    }
    return true;
  }
  return false;
}

// Bernoulli as a 2-state chain: both rows equal the marginal.
Markov as_markov(const MeasureModel& m) {
  if (const auto* mk = m.get_if<Markov>()) return *mk;
  const auto& b = *m.get_if<Bernoulli>();
  Markov mk;
  mk.pi = {1.0 - b.p, b.p};
  mk.P = {{{1.0 - b.p, b.p}, {1.0 - b.p, b.p}}};
  return mk;
}

// mu([u] cap T^-k [v]) for one Bernoulli/Markov component.
std::vector<double> joint_sequence_markov(const MeasureModel& model,
                                          const BinaryWord& u,
                                          const BinaryWord& v,
                                          std::uint64_t n) {
  const Markov mk = as_markov(model);
  const auto lu = u.size();
  std::vector<double> a(n, 0.0);

  // Overlap regime k < |u|: the two constraints merge into one word.
  for (std::uint64_t k = 0; k < std::min<std::uint64_t>(lu, n); ++k) {
    bool consistent = true;
    for (std::size_t i = 0; i < v.size() && k + i < lu; ++i) {
      if (u[k + i] != v[i]) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    BinaryWord merged = u;
    for (std::size_t i = lu - k; i < v.size(); ++i) merged.push_back(v[i]);
    a[k] = log_cylinder(model, merged).linear();
  }

  if (n <= lu || u.empty() || v.empty()) {
    // Degenerate cylinders: an empty u or v denotes the whole space.
    if (u.empty() || v.empty()) {
      const double mu_u = log_cylinder(model, u).linear();
      const double mu_v = log_cylinder(model, v).linear();
      for (std::uint64_t k = u.empty() ? 0 : lu; k < n; ++k) a[k] = mu_u * mu_v;
    }
    return a;
  }

  // Separated regime: chain the gap with transition-matrix powers.
  const double mu_u = log_cylinder(model, u).linear();
  const double mu_v = log_cylinder(model, v).linear();
  const double pi_v0 = mk.pi[v[0]];
  const int u_last = u[lu - 1];
  // row = (P^g)[u_last, .], advanced one multiply per k.
  std::array<double, 2> row{u_last == 0 ? 1.0 : 0.0, u_last == 1 ? 1.0 : 0.0};
  for (std::uint64_t k = lu; k < n; ++k) {
    const std::array<double, 2> next{
        row[0] * mk.P[0][0] + row[1] * mk.P[1][0],
        row[0] * mk.P[0][1] + row[1] * mk.P[1][1]};
    row = next;  // g = k - |u| + 1 steps
    a[k] = pi_v0 > 0.0 ? mu_u * row[v[0]] * mu_v / pi_v0 : 0.0;
  }
  return a;
}

std::vector<double> joint_sequence_exact(const MeasureModel& model,
                                         const BinaryWord& u,
                                         const BinaryWord& v, std::uint64_t n) {
  if (const auto* mix = model.get_if<Mixture>()) {
    std::vector<double> a(n, 0.0);
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      const auto part = joint_sequence_markov(mix->components[i], u, v, n);
      for (std::uint64_t k = 0; k < n; ++k) a[k] += mix->weights[i] * part[k];
    }
    return a;
  }
  return joint_sequence_markov(model, u, v, n);
}

}  // namespace

ConvergenceReport correlation_cesaro(const MeasureModel& m, const BinaryWord& u,
                                     const BinaryWord& v, std::uint64_t n,
                                     const CorrelationOptions& opt) {
  if (n == 0) throw std::invalid_argument("correlation needs n >= 1");
  const double target =
      log_cylinder(m, u).linear() * log_cylinder(m, v).linear();
  const bool exact = !opt.monte_carlo && has_exact_correlation(m);

  std::vector<double> a;
  if (exact) {
    a = joint_sequence_exact(m, u, v, n);
  } else {
    a.assign(n, 0.0);
    const std::uint64_t len = (n - 1) + std::max(u.size(), v.size());
    for (std::uint64_t r = 0; r < opt.n_samples; ++r) {
      const BinaryWord x = sample_prefix(m, len, opt.seed, r);
      if (!matches_at(x, u, 0)) continue;
      for (std::uint64_t k = 0; k < n; ++k) {
        if (matches_at(x, v, k)) a[k] += 1.0;
      }
    }
    for (auto& t : a) t /= static_cast<double>(opt.n_samples);
  }

  ConvergenceReport rep;
  rep.note("model", m.id());
  rep.note("method", exact ? "exact" : "monte_carlo");
  if (!exact) {
    rep.note("samples", std::to_string(opt.n_samples));
    rep.note("seed", std::to_string(opt.seed));
  }
  rep.note("u", u.to_string());
  rep.note("v", v.to_string());
  rep.rows.reserve(n);
  CompensatedSum run;
  for (std::uint64_t k = 0; k < n; ++k) {
    run.add(a[k]);
    rep.rows.push_back({k + 1, run.value() / static_cast<double>(k + 1), target,
                        std::nullopt});
  }
  return rep;
}

}  // namespace cantor
