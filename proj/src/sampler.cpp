#include "cantor/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace cantor {

namespace {

BinaryWord sample_component(const MeasureModel& m, std::uint64_t n,
                            SplitMix64& rng) {
  BinaryWord x;
  x.reserve(n);
  CylinderEval ev(m);
  for (std::uint64_t i = 0; i < n; ++i) {
    const LogProb base = ev.logp();
    const LogProb one = ev.extend_logp(1);
    // P(1 | prefix); the prefix has positive measure by induction.
    const double p1 = one.is_null() ? 0.0 : std::exp2(one.v - base.v);
    const std::uint8_t bit = rng.next_unit() < p1 ? 1 : 0;
    ev.push(bit);
    x.push_back(bit);
  }
  return x;
}

}  // namespace

BinaryWord sample_prefix(const SampleRun& run) {
  if (run.model == nullptr) throw std::invalid_argument("sample needs a model");
  SplitMix64 rng = replica_stream(run.seed, run.replica);
  const MeasureModel& m = *run.model;

  if (const auto* mix = m.get_if<Mixture>()) {
    // The first draw picks the component for the whole run; the remaining
    // stream samples from it.
    const double u = rng.next_unit();
    double cum = 0.0;
    std::size_t pick = mix->components.size() - 1;
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      cum += mix->weights[i];
      if (u < cum) {
        pick = i;
        break;
      }
    }
    return sample_component(mix->components[pick], run.length, rng);
  }
  return sample_component(m, run.length, rng);
}

BinaryWord sample_prefix(const MeasureModel& m, std::uint64_t n,
                         std::uint64_t seed, std::uint64_t replica) {
  SampleRun run;
  run.model = &m;
  run.length = n;
  run.seed = seed;
  run.replica = replica;
  return sample_prefix(run);
}

BinaryWord adversarial_sequence(const AdversarialKind& kind, std::uint64_t n) {
  BinaryWord x;
  x.reserve(n);
  switch (kind.type) {
    case AdversarialKind::Type::all_zeros:
      for (std::uint64_t i = 0; i < n; ++i) x.push_back(0);
      return x;
    case AdversarialKind::Type::periodic: {
      if (kind.pattern.empty()) {
        throw std::invalid_argument("periodic sequence needs a pattern");
      }
      const BinaryWord pat = BinaryWord::from_string(kind.pattern);
      for (std::uint64_t i = 0; i < n; ++i) x.push_back(pat[i % pat.size()]);
      return x;
    }
    case AdversarialKind::Type::fixed_seed_coinflips: {
      const MeasureModel coin = MeasureModel::bernoulli(0.5);
      return sample_prefix(coin, n, 0, 0);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace cantor
