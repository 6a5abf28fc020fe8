#include "cantor/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace cantor {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_convergence_csv_header(std::ostream& out) {
  out << "n,estimate,target,abs_error\n";
}

void write_convergence_csv_rows(std::ostream& out, const ConvergenceReport& r) {
  for (const auto& row : r.rows) {
    out << row.n << ',' << format_double(row.estimate) << ',';
    if (row.target) {
      out << format_double(*row.target) << ','
          << format_double(std::abs(row.estimate - *row.target));
    } else {
      out << "unknown,n/a";
    }
    out << '\n';
  }
}

}  // namespace cantor
