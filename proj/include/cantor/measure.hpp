#ifndef CANTOR_MEASURE_HPP
#define CANTOR_MEASURE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cantor/logprob.hpp"
#include "cantor/numeric.hpp"
#include "cantor/report.hpp"
#include "cantor/word.hpp"

namespace cantor {

// Small dense row-major square matrix; big enough for transition kernels.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// i.i.d. coin with P(1) = p.
struct Bernoulli {
  double p = 0.5;
};

// Two-state chain on the observed alphabet. pi is the start distribution;
// when it equals the stationary distribution of P the measure is
// shift-invariant.
struct Markov {
  std::array<double, 2> pi{0.5, 0.5};
  std::array<std::array<double, 2>, 2> P{{{0.5, 0.5}, {0.5, 0.5}}};
};

// Hidden chain over m states with a deterministic binary emission per state.
struct HiddenMarkov {
  std::vector<double> pi;
  Matrix Q;
  std::vector<std::uint8_t> emit;
};

class MeasureModel;

// Convex combination of non-mixture components; the canonical non-ergodic
// family. Depth is capped at one: components may not be mixtures.
struct Mixture {
  std::vector<double> weights;
  std::vector<MeasureModel> components;
};

// A computable measure on infinite binary sequences, given by exact cylinder
// log-probabilities. Immutable after construction and safe to share across
// threads.
class MeasureModel {
 public:
  using Variant = std::variant<Bernoulli, Markov, HiddenMarkov, Mixture>;

  static MeasureModel bernoulli(double p, std::string id = "bernoulli");
  // Computes the stationary distribution of P for the start distribution.
  static MeasureModel markov(const std::array<std::array<double, 2>, 2>& P,
                             std::string id = "markov");
  // Requires pi to be stationary for P (tolerance 1e-10).
  static MeasureModel markov(const std::array<double, 2>& pi,
                             const std::array<std::array<double, 2>, 2>& P,
                             std::string id = "markov");
  // Accepts a non-stationary start; for diagnostics only. The resulting
  // measure is generally not shift-invariant, which check_shift_invariance
  // will report.
  static MeasureModel markov_with_start(
      const std::array<double, 2>& pi,
      const std::array<std::array<double, 2>, 2>& P, std::string id = "markov");
  static MeasureModel hidden_markov(const Matrix& Q,
                                    const std::vector<std::uint8_t>& emit,
                                    std::string id = "hidden_markov");
  // Accepts any valid start over the hidden states; validate() reports the
  // stationarity residual when it is not invariant.
  static MeasureModel hidden_markov(const std::vector<double>& pi,
                                    const Matrix& Q,
                                    const std::vector<std::uint8_t>& emit,
                                    std::string id = "hidden_markov");
  static MeasureModel mixture(const std::vector<double>& weights,
                              std::vector<MeasureModel> components,
                              std::string id = "mixture");

  const Variant& dist() const { return v_; }
  const std::string& id() const { return id_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

 private:
  MeasureModel(Variant v, std::string id);
  Variant v_;
  std::string id_;
};

// Incremental cylinder evaluator over one growing word. Holds the state
// needed to extend log2 mu[w] by one bit in O(1) (O(m^2) for hidden chains,
// O(#components) for mixtures).
class CylinderEval {
 public:
  explicit CylinderEval(const MeasureModel& m);

  LogProb logp() const;
  // log2 mu[w b] without committing the bit.
  LogProb extend_logp(std::uint8_t bit) const;
  void push(std::uint8_t bit);
  void push_all(BitSpan bits);
  std::size_t length() const { return len_; }

 private:
  // The state constructors live out of line: the variant member below
  // instantiates while this class is still incomplete, where in-class
  // initializers are not parsed yet.
  struct BernoulliState {
    BernoulliState();
    std::uint64_t ones = 0, zeros = 0;
  };
  struct MarkovState {
    MarkovState();
    CompensatedSum acc;
    int last = -1;
    bool null = false;
  };
  struct HmmState {
    HmmState();
    std::vector<double> alpha;  // filtered posterior over hidden states
    CompensatedSum acc;         // accumulated log2 of the normalizers
    bool null = false;
  };
  struct MixtureState {
    MixtureState();
    std::vector<CylinderEval> comps;
  };
  using State = std::variant<BernoulliState, MarkovState, HmmState, MixtureState>;

  const MeasureModel* model_;
  std::size_t len_ = 0;
  State st_;
};

// --- Operations -----------------------------------------------------------

// log2 mu[w]; mu[empty] = 1. Probability-zero cylinders yield LogProb::null(),
// never an error.
LogProb log_cylinder(const MeasureModel& m, BitSpan w);

// log2 mu[w b] - log2 mu[w]. Throws ConditioningOnNull when mu[w] = 0.
LogProb conditional_next_logprob(const MeasureModel& m, BitSpan w,
                                 std::uint8_t bit);

// Stationary pi with pi P = pi, sum 1. Dense solve for n <= 8; power
// iteration (tol 1e-13, max 1e6 sweeps) above that. Throws NonConvergence
// when the iteration stalls, which signals a reducible or periodic chain.
std::vector<double> stationary_distribution(const Matrix& P);

// Structural validation: row sums, weight sums, stationarity residuals,
// emission values. Hard shape errors throw InvalidModel at construction;
// this reports residuals and warnings (e.g. a periodic transition graph).
CheckReport validate(const MeasureModel& m);

// Checks |mu[0w] + mu[1w] - mu[w]| < tol for every |w| <= depth. Exhaustive;
// depth is capped at 22 (BudgetExceeded above).
CheckReport check_shift_invariance(const MeasureModel& m, int depth, double tol);

// Period of the positive-transition graph (gcd of cycle lengths); 1 when
// aperiodic, 0 when the graph is not strongly connected.
int chain_period(const Matrix& P);

struct CorrelationOptions {
  // Force the sampling path even when an exact path exists.
  bool monte_carlo = false;
  std::uint64_t n_samples = 10000;
  std::uint64_t seed = 0;
};

// Cesaro averages c_m = (1/m) sum_{k<m} mu([u] cap T^-k [v]) for m = 1..n,
// against the ergodicity target mu[u]*mu[v]. Exact path for Bernoulli,
// Markov, and mixtures of those; Monte Carlo fallback for anything else,
// flagged in the report metadata.
ConvergenceReport correlation_cesaro(const MeasureModel& m, const BinaryWord& u,
                                     const BinaryWord& v, std::uint64_t n,
                                     const CorrelationOptions& opt = {});

}  // namespace cantor

#endif
