#ifndef CANTOR_REPORT_HPP
#define CANTOR_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cantor {

// Convergence table produced by every limit-checking operation. Rows are
// strictly increasing in n within one report; multi-replica output files are
// concatenations of per-replica reports in replica order.
struct ConvergenceReport {
  struct Row {
    std::uint64_t n = 0;
    double estimate = 0.0;
    std::optional<double> target;   // absent -> "unknown"
    std::optional<double> stderror; // populated by Monte Carlo aggregates
  };

  std::vector<Row> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  static std::optional<double> abs_error(const Row& r) {
    if (!r.target) return std::nullopt;
    return std::abs(r.estimate - *r.target);
  }
  void note(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
};

// Outcome of a structural check (shift-invariance, model validation).
// Failures are reported here, never thrown.
struct CheckReport {
  bool passed = true;
  double worst_violation = 0.0;
  std::string worst_item;
  std::uint64_t items_checked = 0;
  double tolerance = 0.0;
  std::vector<std::string> warnings;
};

// Shortest round-trip decimal rendering; locale-independent and byte-stable
// across reruns of the same binary.
std::string format_double(double v);

// Writers for the documented CSV schemas. `convergence` emits
// "n,estimate,target,abs_error" with "unknown"/"n/a" placeholders.
void write_convergence_csv_header(std::ostream& out);
void write_convergence_csv_rows(std::ostream& out, const ConvergenceReport& r);

}  // namespace cantor

#endif
