#include "cantor/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cantor/entropy.hpp"
#include "cantor/errors.hpp"

namespace cantor {

namespace {

// ceil(log2 j) + 1 bits for the pair (prefix index, new bit).
std::uint64_t phrase_cost(std::uint64_t j) {
  return (j <= 1 ? 0 : std::bit_width(j - 1)) + 1;
}

void check_grid(const std::vector<std::uint64_t>& n_grid, std::size_t have) {
  if (n_grid.empty()) throw std::invalid_argument("empty grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || n_grid[i] > have) {
      throw std::invalid_argument("grid point " + std::to_string(n_grid[i]) +
                                  " is outside the available prefix");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
}

}  // namespace

Lz78Parser::Lz78Parser() : child_(1, {-1, -1}) {}

void Lz78Parser::feed(std::uint8_t bit) {
  const std::int32_t next = child_[node_][bit];
  if (next >= 0) {
    node_ = next;
    return;
  }
  child_[node_][bit] = static_cast<std::int32_t>(child_.size());
  child_.push_back({-1, -1});
  ++complete_;
  bits_ += phrase_cost(complete_);
  node_ = 0;
}

void Lz78Parser::feed_all(BitSpan bits) {
  for (auto b : bits) feed(b);
}

std::uint64_t Lz78Parser::code_length() const {
  return bits_ + (node_ != 0 ? phrase_cost(complete_ + 1) : 0);
}

std::uint64_t lz78_codelen(BitSpan w) {
  Lz78Parser p;
  p.feed_all(w);
  return p.code_length();
}

double ideal_codelen(const MeasureModel& m, BitSpan w) {
  const LogProb lp = log_cylinder(m, w);
  if (lp.is_null()) throw NullCylinder("word has measure zero under " + m.id());
  return -lp.v;
}

DeficiencyTrace deficiency_trace(const MeasureModel& m, BitSpan x,
                                 const std::vector<std::uint64_t>& n_grid) {
  check_grid(n_grid, x.size());
  DeficiencyTrace trace;
  Lz78Parser parser;
  CylinderEval ev(m);
  double sup = -std::numeric_limits<double>::infinity();
  std::size_t gi = 0;
  for (std::uint64_t i = 0; i < n_grid.back(); ++i) {
    parser.feed(x[i]);
    ev.push(x[i]);
    if (ev.logp().is_null()) {
      trace.null_at = i + 1;
      return trace;
    }
    if (i + 1 == n_grid[gi]) {
      DeficiencyTrace::Row r;
      r.n = i + 1;
      r.ideal_bits = -ev.logp().v;
      r.coder_bits = parser.code_length();
      r.deficiency = r.ideal_bits - static_cast<double>(r.coder_bits);
      sup = std::max(sup, r.deficiency);
      r.running_sup = sup;
      trace.rows.push_back(r);
      ++gi;
    }
  }
  return trace;
}

DimEstimates dim_estimates(BitSpan x, CoderKind coder, const MeasureModel* m,
                           const std::vector<std::uint64_t>& n_grid,
                           double tail_fraction) {
  check_grid(n_grid, x.size());
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("tail fraction must lie in (0, 1]");
  }
  if (coder == CoderKind::ideal && m == nullptr) {
    throw std::invalid_argument("the ideal coder needs a model");
  }

  DimEstimates out;
  out.rates.note("coder", coder == CoderKind::lz78 ? "lz78" : "ideal");
  std::optional<double> target;
  if (coder == CoderKind::ideal &&
      (m->get_if<Bernoulli>() || m->get_if<Markov>())) {
    target = closed_form_entropy(*m);
  }
  if (m != nullptr) out.rates.note("model", m->id());

  Lz78Parser parser;
  std::optional<CylinderEval> ev;
  if (coder == CoderKind::ideal) ev.emplace(*m);
  std::size_t gi = 0;
  for (std::uint64_t i = 0; i < n_grid.back(); ++i) {
    if (ev) {
      ev->push(x[i]);
    } else {
      parser.feed(x[i]);
    }
    if (i + 1 == n_grid[gi]) {
      double rate;
      if (ev) {
        const LogProb lp = ev->logp();
        rate = lp.is_null() ? std::numeric_limits<double>::infinity()
                            : -lp.v / static_cast<double>(i + 1);
      } else {
        rate = static_cast<double>(parser.code_length()) /
               static_cast<double>(i + 1);
      }
      out.rates.rows.push_back({i + 1, rate, target, std::nullopt});
      ++gi;
    }
  }

  out.tail_points = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(n_grid.size())));
  out.tail_points = std::min(out.tail_points, out.rates.rows.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = out.rates.rows.size() - out.tail_points;
       i < out.rates.rows.size(); ++i) {
    lo = std::min(lo, out.rates.rows[i].estimate);
    hi = std::max(hi, out.rates.rows[i].estimate);
  }
  out.dim_proxy = lo;
  out.Dim_proxy = hi;
  return out;
}

}  // namespace cantor
