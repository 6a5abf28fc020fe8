#include "cantor/smb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cantor/entropy.hpp"
#include "cantor/errors.hpp"
#include "cantor/numeric.hpp"
#include "cantor/sampler.hpp"

namespace cantor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_prefix(BitSpan x, int K) {
  if (K < 0) throw std::invalid_argument("window K must be nonnegative");
  if (x.size() < static_cast<std::size_t>(K) + 1) {
    throw std::invalid_argument("need K+1 bits, have " +
                                std::to_string(x.size()));
  }
}

}  // namespace

std::vector<double> fk_values(const MeasureModel& m, BitSpan x, int K) {
  require_prefix(x, K);
  std::vector<double> out(static_cast<std::size_t>(K) + 1);

  // Two synchronized evaluators: full over x_0..x_k, tail over x_1..x_k.
  CylinderEval full(m), tail(m);
  full.push(x[0]);
  LogProb fp = full.logp();
  out[0] = fp.is_null() ? kInf : -fp.v;
  for (int k = 1; k <= K; ++k) {
    full.push(x[k]);
    tail.push(x[k]);
    const LogProb t = tail.logp();
    if (t.is_null()) {
      throw ConditioningOnNull("conditioning word x_1..x_" + std::to_string(k) +
                               " has measure zero");
    }
    fp = full.logp();
    out[k] = fp.is_null() ? kInf : t.v - fp.v;
  }
  return out;
}

FkProfile fk_profile(const MeasureModel& m, BitSpan x, int K,
                     int stability_window, double stability_tol) {
  FkProfile prof;
  prof.values = fk_values(m, x, K);
  prof.x_prefix = BinaryWord(
      std::vector<std::uint8_t>(x.begin(), x.begin() + K + 1));
  prof.f_star = *std::max_element(prof.values.begin(), prof.values.end());
  prof.f_limit_estimate = prof.values.back();
  const int w = std::min(stability_window, K);
  prof.stability_window = w;
  const auto first = prof.values.end() - (w + 1);
  const auto [lo, hi] = std::minmax_element(first, prof.values.end());
  prof.stable = (*hi - *lo) <= stability_tol;
  return prof;
}

std::vector<double> martingale_values(const MeasureModel& m, BitSpan x, int K) {
  require_prefix(x, K);
  std::vector<double> out(static_cast<std::size_t>(K) + 2);
  out[0] = 1.0;  // log2 d(empty) = log2 2
  for (int L = 1; L <= K + 1; ++L) {
    const LogProb tail = log_cylinder(m, x.subspan(1, L - 1));
    if (tail.is_null()) {
      throw ConditioningOnNull("cylinder x_1..x_" + std::to_string(L - 1) +
                               " has measure zero");
    }
    const LogProb full = log_cylinder(m, x.first(L));
    out[L] = full.is_null() ? kInf : tail.v - full.v;
  }
  return out;
}

double decomposition_residual(const MeasureModel& m, BitSpan x,
                              std::uint64_t n) {
  if (n > x.size()) {
    throw std::invalid_argument("prefix length exceeds the available bits");
  }
  if (n == 0) return 0.0;
  const LogProb lhs_lp = log_cylinder(m, x.first(n));
  if (lhs_lp.is_null()) {
    throw NullCylinder("prefix has measure zero; the decomposition is undefined");
  }
  const double lhs = -lhs_lp.v;

  CompensatedSum rhs;
  if (const auto* b = m.get_if<Bernoulli>()) {
    // Independence: every conditional information is the symbol's own.
    for (std::uint64_t k = 0; k < n; ++k) {
      rhs.add(-std::log2(x[k] ? b->p : 1.0 - b->p));
    }
    return std::abs(lhs - rhs.value());
  }
  if (const auto* mk = m.get_if<Markov>()) {
    const double r0 =
        mk->pi[0] * mk->P[0][0] + mk->pi[1] * mk->P[1][0] - mk->pi[0];
    const double r1 =
        mk->pi[0] * mk->P[0][1] + mk->pi[1] * mk->P[1][1] - mk->pi[1];
    if (std::max(std::abs(r0), std::abs(r1)) < 1e-12) {
      // Stationary first-order chain: the conditionals collapse to one step.
      for (std::uint64_t k = 0; k + 1 < n; ++k) {
        const int a = x[k], bnext = x[k + 1];
        rhs.add(-std::log2(mk->pi[a] * mk->P[a][bnext] / mk->pi[bnext]));
      }
      rhs.add(-std::log2(mk->pi[x[n - 1]]));
      return std::abs(lhs - rhs.value());
    }
  }

  // General route: each summand gets its own full-window evaluation, so the
  // telescoping cancellation is exercised in floating point.
  double prev = 0.0;
  for (std::uint64_t k = n; k-- > 0;) {
    const double full_k = log_cylinder(m, x.subspan(k, n - k)).v;
    rhs.add(prev - full_k);
    prev = full_k;
  }
  return std::abs(lhs - rhs.value());
}

ConvergenceReport log_prob_rate(const MeasureModel& m, BitSpan x,
                                const std::vector<std::uint64_t>& n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("empty grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || n_grid[i] > x.size()) {
      throw std::invalid_argument("grid point " + std::to_string(n_grid[i]) +
                                  " is outside the available prefix");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }

  ConvergenceReport rep;
  rep.note("model", m.id());
  std::optional<double> target;
  if (m.get_if<Bernoulli>() || m.get_if<Markov>()) {
    target = closed_form_entropy(m);
    rep.note("target", "closed_form");
  } else {
    // Upper estimate: block-entropy increment at depth 14. The true rate
    // sits below it by an amount the increment law no longer resolves here,
    // and for non-ergodic models a per-sequence limit is a component rate,
    // not this model-level value.
    const auto H = block_entropy_sweep(m, 15);
    target = H[14] - H[13];
    rep.note("target", "block_increment_n14_upper");
  }

  CylinderEval ev(m);
  std::size_t gi = 0;
  for (std::uint64_t i = 0; i < n_grid.back() && gi < n_grid.size(); ++i) {
    ev.push(x[i]);
    if (i + 1 == n_grid[gi]) {
      const LogProb lp = ev.logp();
      const double est =
          lp.is_null() ? kInf : -lp.v / static_cast<double>(i + 1);
      rep.rows.push_back({i + 1, est, target, std::nullopt});
      ++gi;
    }
  }
  return rep;
}

// --- Cylinder unions ------------------------------------------------------

CylinderUnion::CylinderUnion(std::vector<BinaryWord> words) {
  if (words.empty()) {
    throw std::invalid_argument("cylinder union needs at least one word");
  }
  std::sort(words.begin(), words.end(),
            [](const BinaryWord& a, const BinaryWord& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a.to_string() < b.to_string();
            });
  for (const auto& w : words) {
    const bool covered =
        std::any_of(words_.begin(), words_.end(), [&](const BinaryWord& kept) {
          return cantor::matches_at(w, kept, 0);
        });
    if (!covered) {
      words_.push_back(w);
      max_len_ = std::max(max_len_, w.size());
    }
  }
}

double CylinderUnion::measure(const MeasureModel& m) const {
  // The antichain is pairwise disjoint, so the measures add.
  CompensatedSum s;
  for (const auto& w : words_) s.add(log_cylinder(m, w).linear());
  return s.value();
}

bool CylinderUnion::matches_at(BitSpan x, std::size_t pos) const {
  return std::any_of(words_.begin(), words_.end(), [&](const BinaryWord& w) {
    return cantor::matches_at(x, w, pos);
  });
}

// --- Orbit statistics -----------------------------------------------------

namespace {

std::vector<std::uint64_t> orbit_grid(std::uint64_t n) {
  std::vector<std::uint64_t> g;
  for (std::uint64_t v = 16; v < n; v *= 2) g.push_back(v);
  g.push_back(n);
  return g;
}

template <class Match>
ConvergenceReport birkhoff_impl(BitSpan x, std::uint64_t n,
                                std::size_t window, double target,
                                Match&& match) {
  if (n == 0) throw std::invalid_argument("orbit length must be positive");
  if (n - 1 + window > x.size()) {
    throw std::invalid_argument("orbit needs " +
                                std::to_string(n - 1 + window) +
                                " bits, have " + std::to_string(x.size()));
  }
  ConvergenceReport rep;
  const auto grid = orbit_grid(n);
  std::size_t gi = 0;
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < n && gi < grid.size(); ++k) {
    if (match(k)) ++hits;
    if (k + 1 == grid[gi]) {
      rep.rows.push_back({k + 1,
                          static_cast<double>(hits) /
                              static_cast<double>(k + 1),
                          target, std::nullopt});
      ++gi;
    }
  }
  return rep;
}

}  // namespace

ConvergenceReport birkhoff_average(const MeasureModel& m, BitSpan x, BitSpan u,
                                   std::uint64_t n) {
  auto rep = birkhoff_impl(
      x, n, u.size(), log_cylinder(m, u).linear(),
      [&](std::uint64_t k) { return matches_at(x, u, k); });
  rep.note("model", m.id());
  rep.note("u", BinaryWord(std::vector<std::uint8_t>(u.begin(), u.end()))
                    .to_string());
  return rep;
}

ConvergenceReport birkhoff_average(const MeasureModel& m, BitSpan x,
                                   const CylinderUnion& c, std::uint64_t n) {
  auto rep = birkhoff_impl(
      x, n, c.max_length(), c.measure(m),
      [&](std::uint64_t k) { return c.matches_at(x, k); });
  rep.note("model", m.id());
  rep.note("union_words", std::to_string(c.words().size()));
  return rep;
}

std::optional<std::uint64_t> first_return(BitSpan x, BitSpan u,
                                          std::uint64_t budget) {
  if (u.empty()) return 0;
  if (budget + u.size() > x.size()) {
    throw std::invalid_argument("budget reaches past the available bits");
  }
  for (std::uint64_t k = 0; k <= budget; ++k) {
    if (matches_at(x, u, k)) return k;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> first_return(BitSpan x, const CylinderUnion& c,
                                          std::uint64_t budget) {
  if (budget + c.max_length() > x.size()) {
    throw std::invalid_argument("budget reaches past the available bits");
  }
  for (std::uint64_t k = 0; k <= budget; ++k) {
    if (c.matches_at(x, k)) return k;
  }
  return std::nullopt;
}

// --- Oscillation diagnostics ----------------------------------------------

GtildeReport gtilde_diagnostic(const MeasureModel& m,
                               const std::vector<int>& N_grid, int K,
                               std::uint64_t n_samples, std::uint64_t n_prefix,
                               std::uint64_t seed) {
  if (N_grid.empty()) throw std::invalid_argument("empty N grid");
  for (std::size_t i = 0; i < N_grid.size(); ++i) {
    if (N_grid[i] < 0 || N_grid[i] > K) {
      throw std::invalid_argument("N grid must lie in [0, K]");
    }
    if (i > 0 && N_grid[i] <= N_grid[i - 1]) {
      throw std::invalid_argument("N grid must be strictly increasing");
    }
  }
  if (n_prefix < static_cast<std::uint64_t>(K) + 1) {
    throw std::invalid_argument("prefix length must be at least K+1");
  }
  if (n_samples == 0) throw std::invalid_argument("need at least one sample");

  GtildeReport out;
  out.K = K;
  std::vector<RunningStat> stats(N_grid.size());
  std::vector<double> sufmax(static_cast<std::size_t>(K) + 1);
  std::vector<double> sufmin(static_cast<std::size_t>(K) + 1);

  for (std::uint64_t r = 0; r < n_samples; ++r) {
    const BinaryWord x = sample_prefix(m, n_prefix, seed, r);
    const auto fk = fk_values(m, x, K);
    sufmax[K] = sufmin[K] = fk[K];
    for (int k = K; k-- > 0;) {
      sufmax[k] = std::max(fk[k], sufmax[k + 1]);
      sufmin[k] = std::min(fk[k], sufmin[k + 1]);
    }
    double prev = kInf;
    for (std::size_t i = 0; i < N_grid.size(); ++i) {
      const int N = N_grid[i];
      const double g = sufmax[N] - sufmin[N];
      stats[i].add(g);
      if (g > prev) out.pathwise_nonincreasing = false;
      prev = g;
    }
  }

  out.report.note("model", m.id());
  out.report.note("K", std::to_string(K));
  out.report.note("samples", std::to_string(n_samples));
  out.report.note("prefix", std::to_string(n_prefix));
  out.report.note("seed", std::to_string(seed));
  for (std::size_t i = 0; i < N_grid.size(); ++i) {
    out.report.rows.push_back({static_cast<std::uint64_t>(N_grid[i]),
                               stats[i].mean(), 0.0, stats[i].stderror()});
  }
  return out;
}

FStarEstimate fstar_integral_estimate(const MeasureModel& m, int K,
                                      std::uint64_t n_samples,
                                      std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("need at least one sample");
  RunningStat stat;
  for (std::uint64_t r = 0; r < n_samples; ++r) {
    const BinaryWord x =
        sample_prefix(m, static_cast<std::uint64_t>(K) + 1, seed, r);
    const auto fk = fk_values(m, x, K);
    stat.add(*std::max_element(fk.begin(), fk.end()));
  }
  return {stat.mean(), stat.stderror(), n_samples, K};
}

}  // namespace cantor
