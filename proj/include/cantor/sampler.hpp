#ifndef CANTOR_SAMPLER_HPP
#define CANTOR_SAMPLER_HPP

#include <cstdint>
#include <string>

#include "cantor/measure.hpp"
#include "cantor/word.hpp"

namespace cantor {

// SplitMix64. Fixed constants so every implementation agrees bit-exactly;
// the whole statistical acceptance surface depends on this stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// One SplitMix64 step applied to x as the state; used to derive independent
// replica streams.
inline std::uint64_t splitmix_mix(std::uint64_t x) {
  return SplitMix64(x).next();
}

// Stream for (seed, replica): seeded with seed ^ splitmix_mix(replica).
inline SplitMix64 replica_stream(std::uint64_t seed, std::uint64_t replica) {
  return SplitMix64(seed ^ splitmix_mix(replica));
}

// A reproducible sampling context. Identical fields always yield the
// identical word; distinct replicas under one seed are independent streams.
struct SampleRun {
  const MeasureModel* model = nullptr;
  std::uint64_t length = 0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
};

// Draws a length-n prefix distributed according to the model. Bit i is 1
// when the stream's uniform falls below the conditional probability of 1
// given the bits so far; one uniform per bit. Mixtures draw their component
// once per run from the first uniform, then sample from that component.
BinaryWord sample_prefix(const SampleRun& run);
BinaryWord sample_prefix(const MeasureModel& m, std::uint64_t n,
                         std::uint64_t seed, std::uint64_t replica = 0);

// Canonical non-random control sequences.
struct AdversarialKind {
  enum class Type { all_zeros, periodic, fixed_seed_coinflips };
  Type type = Type::all_zeros;
  std::string pattern;  // used by periodic; must be nonempty

  static AdversarialKind all_zeros() { return {Type::all_zeros, ""}; }
  static AdversarialKind periodic(std::string p) {
    return {Type::periodic, std::move(p)};
  }
  // Alias for sample_prefix(Bernoulli 0.5, n, seed=0, replica=0).
  static AdversarialKind fixed_seed_coinflips() {
    return {Type::fixed_seed_coinflips, ""};
  }
};

BinaryWord adversarial_sequence(const AdversarialKind& kind, std::uint64_t n);

}  // namespace cantor

#endif
