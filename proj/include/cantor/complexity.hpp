#ifndef CANTOR_COMPLEXITY_HPP
#define CANTOR_COMPLEXITY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cantor/measure.hpp"
#include "cantor/report.hpp"
#include "cantor/word.hpp"

namespace cantor {

// Incremental LZ78 parse of a bit stream. Phrases are the shortest prefixes
// of the remainder not seen before; phrase j is coded as (prefix-phrase
// index, last bit) and costs ceil(log2 j) + 1 bits, with ceil(log2 1) = 0.
// A final partial phrase is coded identically at its own ordinal.
class Lz78Parser {
 public:
  Lz78Parser();
  void feed(std::uint8_t bit);
  void feed_all(BitSpan bits);

  std::uint64_t phrases() const { return complete_ + (node_ != 0 ? 1 : 0); }
  // Code length of everything fed so far, the pending partial phrase
  // included.
  std::uint64_t code_length() const;

 private:
  std::vector<std::array<std::int32_t, 2>> child_;
  std::int32_t node_ = 0;  // current position in the phrase trie
  std::uint64_t complete_ = 0;
  std::uint64_t bits_ = 0;  // code length of the complete phrases
};

// Total LZ78 code length of w in bits (a nonnegative integer).
std::uint64_t lz78_codelen(BitSpan w);

// Ideal (model) code length -log2 mu[w]. Throws NullCylinder when mu[w]=0.
double ideal_codelen(const MeasureModel& m, BitSpan w);

// Ideal-minus-compressor code length along prefixes, with its running sup.
// A bounded sup is consistent with typicality; linear growth certifies
// non-typicality relative to the model (the compressor length upper-bounds
// the complexity only up to O(log n), so only lower bounds are hard claims).
// When a prefix hits a null cylinder the trace stops and null_at records the
// offending length: a definitive non-typicality verdict for that model.
struct DeficiencyTrace {
  struct Row {
    std::uint64_t n = 0;
    double ideal_bits = 0.0;
    std::uint64_t coder_bits = 0;
    double deficiency = 0.0;
    double running_sup = 0.0;
  };
  std::vector<Row> rows;
  std::optional<std::uint64_t> null_at;
};

DeficiencyTrace deficiency_trace(const MeasureModel& m, BitSpan x,
                                 const std::vector<std::uint64_t>& n_grid);

enum class CoderKind { lz78, ideal };

// Rate curve r_n = codelen(x|n)/n, with tail min/max proxies for the lower
// and upper complexity rates. The tail is the largest
// ceil(tail_fraction * #grid) grid points.
struct DimEstimates {
  double dim_proxy = 0.0;
  double Dim_proxy = 0.0;
  ConvergenceReport rates;
  std::size_t tail_points = 0;
};

// coder = lz78 ignores the model (pass nullptr); coder = ideal requires one.
DimEstimates dim_estimates(BitSpan x, CoderKind coder, const MeasureModel* m,
                           const std::vector<std::uint64_t>& n_grid,
                           double tail_fraction);

}  // namespace cantor

#endif
