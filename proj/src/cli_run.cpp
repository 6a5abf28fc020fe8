#include "cantor/cli_run.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cantor/complexity.hpp"
#include "cantor/entropy.hpp"
#include "cantor/errors.hpp"
#include "cantor/measure.hpp"
#include "cantor/model_io.hpp"
#include "cantor/numeric.hpp"
#include "cantor/report.hpp"
#include "cantor/sampler.hpp"
#include "cantor/smb.hpp"
#include "cantor/word.hpp"

namespace cantor {

using nlohmann::ordered_json;

std::vector<std::uint64_t> make_grid(const GridSpec& g) {
  if (g.start < 1 || !(g.factor > 1.0) || g.count < 1) {
    throw std::invalid_argument(
        "grid spec needs start >= 1, factor > 1, count >= 1");
  }
  std::vector<std::uint64_t> out;
  double v = static_cast<double>(g.start);
  for (std::size_t i = 0; i < g.count; ++i) {
    const auto u = static_cast<std::uint64_t>(std::llround(v));
    if (out.empty() || u > out.back()) out.push_back(u);
    v *= g.factor;
  }
  return out;
}

std::vector<std::uint64_t> make_grid_upto(const GridSpec& g, std::uint64_t n) {
  auto grid = make_grid(g);
  std::erase_if(grid, [n](std::uint64_t v) { return v > n; });
  if (grid.empty() || grid.back() != n) grid.push_back(n);
  return grid;
}

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec g;
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') ||
      !std::getline(in, c)) {
    throw std::invalid_argument("grid spec must be start:factor:count");
  }
  try {
    std::size_t pos = 0;
    g.start = std::stoull(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    g.factor = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    g.count = std::stoull(c, &pos);
    if (pos != c.size()) throw std::invalid_argument(c);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse grid spec \"" + text + "\"");
  }
  return g;
}

namespace {

// --- Output plumbing ------------------------------------------------------

struct Sink {
  std::ofstream file;
  std::ostream* out = nullptr;

  Sink(const std::string& path, bool binary) {
    if (path.empty()) {
      out = &std::cout;
      return;
    }
    file.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!file) {
      throw std::ios_base::failure("cannot open output file \"" + path + "\"");
    }
    out = &file;
  }
  std::ostream& stream() { return *out; }
};

ordered_json report_to_json(const ConvergenceReport& rep) {
  ordered_json j;
  j["metadata"] = ordered_json::object();
  for (const auto& [k, v] : rep.metadata) j["metadata"][k] = v;
  j["rows"] = ordered_json::array();
  for (const auto& r : rep.rows) {
    ordered_json row;
    row["n"] = r.n;
    row["estimate"] = r.estimate;
    row["target"] = r.target ? ordered_json(*r.target) : ordered_json(nullptr);
    const auto err = ConvergenceReport::abs_error(r);
    row["abs_error"] = err ? ordered_json(*err) : ordered_json(nullptr);
    if (r.stderror) row["stderr"] = *r.stderror;
    j["rows"].push_back(std::move(row));
  }
  return j;
}

void require_format(const ExperimentConfig& cfg,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (cfg.format == a) return;
  }
  throw std::invalid_argument("unsupported format \"" + cfg.format +
                              "\" for command " + cfg.command);
}

MeasureModel need_model(const ExperimentConfig& cfg, bool strict = true) {
  if (cfg.model_file.empty()) {
    throw std::invalid_argument("command " + cfg.command + " needs --model");
  }
  return load_model_file(cfg.model_file, strict);
}

std::uint64_t need_n(const ExperimentConfig& cfg) {
  if (cfg.n == 0) {
    throw std::invalid_argument("command " + cfg.command + " needs --n >= 1");
  }
  return cfg.n;
}

BinaryWord read_sequence_file(const std::string& path,
                              const std::string& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot open input file \"" + path + "\"");
  }
  if (format == "bits") {
    BinaryWord w;
    if (!read_packed(in, w)) {
      throw std::invalid_argument("input file holds no packed frame");
    }
    return w;
  }
  if (format == "ascii") {
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
      }
      if (!line.empty()) return BinaryWord::from_string(line);
    }
    throw std::invalid_argument("input file holds no sequence line");
  }
  throw std::invalid_argument("unknown input format \"" + format + "\"");
}

AdversarialKind parse_adversarial(const std::string& text) {
  if (text == "all_zeros") return AdversarialKind::all_zeros();
  if (text == "coinflips") return AdversarialKind::fixed_seed_coinflips();
  if (text.starts_with("periodic:")) {
    return AdversarialKind::periodic(text.substr(9));
  }
  throw std::invalid_argument(
      "adversarial kind must be all_zeros, coinflips, or periodic:PATTERN");
}

void verbose_note(const ExperimentConfig& cfg, std::ostream& err,
                  std::uint64_t replica, const std::string& what) {
  if (cfg.verbose) {
    err << "# replica " << replica << ": " << what << "\n";
  }
}

// --- Commands -------------------------------------------------------------

void run_sample(const ExperimentConfig& cfg, std::ostream& err) {
  require_format(cfg, {"ascii", "bits"});
  const std::uint64_t n = need_n(cfg);
  Sink sink(cfg.output, cfg.format == "bits");

  std::optional<MeasureModel> model;
  std::optional<AdversarialKind> kind;
  if (!cfg.adversarial.empty()) {
    kind = parse_adversarial(cfg.adversarial);
  } else {
    model = need_model(cfg);
  }

  for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
    const BinaryWord x = kind ? adversarial_sequence(*kind, n)
                              : sample_prefix(*model, n, cfg.seed, r);
    if (cfg.format == "bits") {
      write_packed(sink.stream(), x);
    } else {
      sink.stream() << x.to_string() << "\n";
    }
    verbose_note(cfg, err, r, "sampled " + std::to_string(n) + " bits");
  }
}

void run_entropy(const ExperimentConfig& cfg, std::ostream&) {
  require_format(cfg, {"csv", "json"});
  const MeasureModel m = need_model(cfg);
  const int n_max = static_cast<int>(need_n(cfg));
  const EntropyTable t = entropy_rate_table(m, n_max);
  Sink sink(cfg.output, false);

  if (cfg.format == "csv") {
    sink.stream() << "n,H_n,H_n_over_n,increment\n";
    for (const auto& r : t.rows) {
      sink.stream() << r.n << "," << format_double(r.block) << ","
                    << format_double(r.per_symbol) << ","
                    << format_double(r.increment) << "\n";
    }
    return;
  }
  ordered_json j;
  j["command"] = "entropy";
  j["model"] = m.id();
  j["rows"] = ordered_json::array();
  for (const auto& r : t.rows) {
    j["rows"].push_back({{"n", r.n},
                         {"H_n", r.block},
                         {"H_n_over_n", r.per_symbol},
                         {"increment", r.increment}});
  }
  j["monotone"] = {{"block_nondecreasing", t.entropy_nondecreasing},
                   {"per_symbol_nonincreasing", t.per_symbol_nonincreasing},
                   {"increments_nonincreasing", t.increments_nonincreasing}};
  sink.stream() << j.dump(2) << "\n";
}

void run_smb_report(const ExperimentConfig& cfg, std::ostream& err) {
  require_format(cfg, {"csv", "json"});
  const MeasureModel m = need_model(cfg);
  const std::uint64_t n = need_n(cfg);
  const auto grid = make_grid_upto(cfg.grid, n);
  Sink sink(cfg.output, false);

  ordered_json replicas = ordered_json::array();
  if (cfg.format == "csv") write_convergence_csv_header(sink.stream());
  for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
    const BinaryWord x = sample_prefix(m, n, cfg.seed, r);
    auto rep = log_prob_rate(m, x, grid);
    rep.note("replica", std::to_string(r));
    if (cfg.format == "csv") {
      write_convergence_csv_rows(sink.stream(), rep);
    } else {
      ordered_json jr = report_to_json(rep);
      jr["replica"] = r;
      replicas.push_back(std::move(jr));
    }
    verbose_note(cfg, err, r, "rate over " + std::to_string(grid.size()) +
                                  " grid points");
  }
  if (cfg.format == "json") {
    ordered_json j;
    j["command"] = "smb-report";
    j["replicas"] = std::move(replicas);
    sink.stream() << j.dump(2) << "\n";
  }
}

void run_fk(const ExperimentConfig& cfg, std::ostream& err) {
  require_format(cfg, {"csv", "json"});
  const MeasureModel m = need_model(cfg);
  const std::uint64_t n = need_n(cfg);
  const int K = cfg.K < 0 ? static_cast<int>(n) - 1 : cfg.K;
  Sink sink(cfg.output, false);

  ordered_json replicas = ordered_json::array();
  if (cfg.format == "csv") sink.stream() << "k,f_k\n";
  for (std::uint64_t r = 0; r < cfg.replicas; ++r) {
    const BinaryWord x = sample_prefix(m, n, cfg.seed, r);
    const auto vals = fk_values(m, x, K);
    if (cfg.format == "csv") {
      for (std::size_t k = 0; k < vals.size(); ++k) {
        sink.stream() << k << "," << format_double(vals[k]) << "\n";
      }
    } else {
      ordered_json jr;
      jr["replica"] = r;
      jr["prefix"] = x.to_string().substr(0, K + 1);
      jr["f"] = vals;
      replicas.push_back(std::move(jr));
    }
    verbose_note(cfg, err, r, "f_0..f_" + std::to_string(K));
  }
  if (cfg.format == "json") {
    ordered_json j;
    j["command"] = "fk";
    j["replicas"] = std::move(replicas);
    sink.stream() << j.dump(2) << "\n";
  }
}

CoderKind parse_coder(const std::string& text) {
  if (text == "lz78") return CoderKind::lz78;
  if (text == "ideal") return CoderKind::ideal;
  throw std::invalid_argument("coder must be lz78 or ideal");
}

void run_dimension(const ExperimentConfig& cfg, std::ostream& err) {
  require_format(cfg, {"csv", "json"});
  const CoderKind coder = parse_coder(cfg.coder);
  std::optional<MeasureModel> model;
  if (!cfg.model_file.empty()) model = need_model(cfg);
  if (coder == CoderKind::ideal && !model) {
    throw std::invalid_argument("the ideal coder needs --model");
  }
  const bool from_file = !cfg.input.empty();
  if (!from_file && !model) {
    throw std::invalid_argument("dimension needs --input or --model");
  }
  Sink sink(cfg.output, false);

  const std::uint64_t replicas = from_file ? 1 : cfg.replicas;
  ordered_json out_replicas = ordered_json::array();
  if (cfg.format == "csv") sink.stream() << "n,rate\n";
  for (std::uint64_t r = 0; r < replicas; ++r) {
    BinaryWord x;
    if (from_file) {
      x = read_sequence_file(cfg.input, cfg.input_format);
    } else {
      x = sample_prefix(*model, need_n(cfg), cfg.seed, r);
    }
    const std::uint64_t n = cfg.n == 0 ? x.size() : std::min<std::uint64_t>(cfg.n, x.size());
    const auto grid = make_grid_upto(cfg.grid, n);
    const DimEstimates est =
        dim_estimates(x, coder, model ? &*model : nullptr, grid,
                      cfg.tail_fraction);
    if (cfg.format == "csv") {
      for (const auto& row : est.rates.rows) {
        sink.stream() << row.n << "," << format_double(row.estimate) << "\n";
      }
    } else {
      ordered_json jr = report_to_json(est.rates);
      jr["replica"] = r;
      jr["dim"] = est.dim_proxy;
      jr["Dim"] = est.Dim_proxy;
      jr["tail_points"] = est.tail_points;
      out_replicas.push_back(std::move(jr));
    }
    verbose_note(cfg, err, r,
                 "dim " + format_double(est.dim_proxy) + " Dim " +
                     format_double(est.Dim_proxy));
  }
  if (cfg.format == "json") {
    ordered_json j;
    j["command"] = "dimension";
    j["coder"] = cfg.coder;
    j["replicas"] = std::move(out_replicas);
    sink.stream() << j.dump(2) << "\n";
  }
}

void run_deficiency(const ExperimentConfig& cfg, std::ostream& err) {
  require_format(cfg, {"csv", "json"});
  const MeasureModel m = need_model(cfg);
  const bool from_file = !cfg.input.empty();
  Sink sink(cfg.output, false);

  const std::uint64_t replicas = from_file ? 1 : cfg.replicas;
  ordered_json out_replicas = ordered_json::array();
  if (cfg.format == "csv") sink.stream() << "n,ideal,coder,deficiency,sup\n";
  for (std::uint64_t r = 0; r < replicas; ++r) {
    BinaryWord x;
    if (from_file) {
      x = read_sequence_file(cfg.input, cfg.input_format);
    } else {
      x = sample_prefix(m, need_n(cfg), cfg.seed, r);
    }
    const std::uint64_t n = cfg.n == 0 ? x.size() : std::min<std::uint64_t>(cfg.n, x.size());
    const auto grid = make_grid_upto(cfg.grid, n);
    const DeficiencyTrace trace = deficiency_trace(m, x, grid);
    if (cfg.format == "csv") {
      for (const auto& row : trace.rows) {
        sink.stream() << row.n << "," << format_double(row.ideal_bits) << ","
                      << row.coder_bits << "," << format_double(row.deficiency)
                      << "," << format_double(row.running_sup) << "\n";
      }
      if (trace.null_at) {
        err << "{\"warning\":\"null_cylinder\",\"n\":" << *trace.null_at
            << "}\n";
      }
    } else {
      ordered_json jr;
      jr["replica"] = r;
      jr["rows"] = ordered_json::array();
      for (const auto& row : trace.rows) {
        jr["rows"].push_back({{"n", row.n},
                              {"ideal", row.ideal_bits},
                              {"coder", row.coder_bits},
                              {"deficiency", row.deficiency},
                              {"sup", row.running_sup}});
      }
      jr["null_at"] = trace.null_at ? ordered_json(*trace.null_at)
                                    : ordered_json(nullptr);
      out_replicas.push_back(std::move(jr));
    }
    verbose_note(cfg, err, r,
                 trace.null_at
                     ? "null cylinder at " + std::to_string(*trace.null_at)
                     : std::to_string(trace.rows.size()) + " rows");
  }
  if (cfg.format == "json") {
    ordered_json j;
    j["command"] = "deficiency";
    j["model"] = m.id();
    j["replicas"] = std::move(out_replicas);
    sink.stream() << j.dump(2) << "\n";
  }
}

void run_invariance(const ExperimentConfig& cfg, std::ostream&) {
  require_format(cfg, {"csv", "json"});
  // Lenient load: a broken start distribution is exactly what this command
  // is for diagnosing.
  const MeasureModel m = need_model(cfg, /*strict=*/false);
  const CheckReport rep = check_shift_invariance(m, cfg.depth, cfg.tol);
  Sink sink(cfg.output, false);

  if (cfg.format == "csv") {
    sink.stream() << "passed,worst_violation,worst_word,words_checked,warnings\n";
    sink.stream() << (rep.passed ? "true" : "false") << ","
                  << format_double(rep.worst_violation) << ","
                  << (rep.worst_item.empty() ? "(none)" : rep.worst_item) << ","
                  << rep.items_checked << ",";
    for (std::size_t i = 0; i < rep.warnings.size(); ++i) {
      if (i) sink.stream() << ";";
      sink.stream() << rep.warnings[i];
    }
    sink.stream() << "\n";
    return;
  }
  ordered_json j;
  j["command"] = "invariance";
  j["model"] = m.id();
  j["passed"] = rep.passed;
  j["worst_violation"] = rep.worst_violation;
  j["worst_word"] = rep.worst_item;
  j["words_checked"] = rep.items_checked;
  j["tolerance"] = rep.tolerance;
  j["warnings"] = rep.warnings;
  sink.stream() << j.dump(2) << "\n";
}

void run_correlation(const ExperimentConfig& cfg, std::ostream&) {
  require_format(cfg, {"csv", "json"});
  const MeasureModel m = need_model(cfg);
  const std::uint64_t n = need_n(cfg);
  const BinaryWord u = BinaryWord::from_string(cfg.u);
  const BinaryWord v = BinaryWord::from_string(cfg.v);
  CorrelationOptions opt;
  opt.monte_carlo = cfg.force_monte_carlo;
  opt.n_samples = cfg.samples;
  opt.seed = cfg.seed;
  const ConvergenceReport rep = correlation_cesaro(m, u, v, n, opt);
  Sink sink(cfg.output, false);

  if (cfg.format == "csv") {
    write_convergence_csv_header(sink.stream());
    write_convergence_csv_rows(sink.stream(), rep);
    return;
  }
  ordered_json j;
  j["command"] = "correlation";
  j.update(report_to_json(rep));
  sink.stream() << j.dump(2) << "\n";
}

void run_summarize(const ExperimentConfig& cfg, std::ostream&) {
  require_format(cfg, {"json"});
  if (cfg.inputs.empty()) {
    throw std::invalid_argument("summarize needs at least one report file");
  }
  const std::string text = summarize_reports(cfg.inputs, cfg.tol, cfg.frac);
  Sink sink(cfg.output, false);
  sink.stream() << text;
}

ordered_json error_kind(const std::exception& e, const char* kind) {
  return ordered_json{{"error", kind}, {"detail", e.what()}};
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& err) {
  try {
    if (cfg.command == "sample") {
      run_sample(cfg, err);
    } else if (cfg.command == "entropy") {
      run_entropy(cfg, err);
    } else if (cfg.command == "smb-report") {
      run_smb_report(cfg, err);
    } else if (cfg.command == "fk") {
      run_fk(cfg, err);
    } else if (cfg.command == "dimension") {
      run_dimension(cfg, err);
    } else if (cfg.command == "deficiency") {
      run_deficiency(cfg, err);
    } else if (cfg.command == "invariance") {
      run_invariance(cfg, err);
    } else if (cfg.command == "correlation") {
      run_correlation(cfg, err);
    } else if (cfg.command == "summarize") {
      run_summarize(cfg, err);
    } else {
      throw std::invalid_argument("unknown command \"" + cfg.command + "\"");
    }
    return 0;
  } catch (const BudgetExceeded& e) {
    err << error_kind(e, "budget_exceeded").dump() << "\n";
    return 3;
  } catch (const InvalidModel& e) {
    err << error_kind(e, "invalid_model").dump() << "\n";
    return 2;
  } catch (const SchemaMismatch& e) {
    err << error_kind(e, "schema_mismatch").dump() << "\n";
    return 2;
  } catch (const ConditioningOnNull& e) {
    err << error_kind(e, "conditioning_on_null").dump() << "\n";
    return 2;
  } catch (const NullCylinder& e) {
    err << error_kind(e, "null_cylinder").dump() << "\n";
    return 2;
  } catch (const NonConvergence& e) {
    err << error_kind(e, "non_convergence").dump() << "\n";
    return 2;
  } catch (const NoClosedForm& e) {
    err << error_kind(e, "no_closed_form").dump() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    err << error_kind(e, "io_error").dump() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    err << error_kind(e, "invalid_argument").dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << error_kind(e, "internal").dump() << "\n";
    return 4;
  }
}

// --- Report aggregation ---------------------------------------------------

namespace {

struct ParsedRow {
  std::uint64_t n = 0;
  double estimate = 0.0;
  std::optional<double> target;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<ParsedRow> parse_convergence_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open report file \"" + path + "\"");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaMismatch("report file \"" + path + "\" is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,estimate,target,abs_error") {
    throw SchemaMismatch("report file \"" + path +
                         "\" has schema \"" + line +
                         "\", expected \"n,estimate,target,abs_error\"");
  }
  std::vector<ParsedRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw SchemaMismatch("report file \"" + path + "\" line " +
                           std::to_string(lineno) + " has " +
                           std::to_string(f.size()) + " fields");
    }
    ParsedRow r;
    try {
      r.n = std::stoull(f[0]);
      r.estimate = std::stod(f[1]);
      if (f[2] != "unknown") r.target = std::stod(f[2]);
    } catch (const std::exception&) {
      throw SchemaMismatch("report file \"" + path + "\" line " +
                           std::to_string(lineno) + " is not numeric");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::string summarize_reports(const std::vector<std::string>& paths, double tol,
                              double frac) {
  struct Cell {
    RunningStat stat;
    std::uint64_t within = 0;
    std::uint64_t with_target = 0;
    std::optional<double> target;
  };
  std::map<std::uint64_t, Cell> by_n;
  for (const auto& path : paths) {
    for (const auto& r : parse_convergence_csv(path)) {
      Cell& c = by_n[r.n];
      c.stat.add(r.estimate);
      if (r.target) {
        ++c.with_target;
        if (std::abs(r.estimate - *r.target) < tol) ++c.within;
        if (!c.target) c.target = r.target;
      }
    }
  }
  if (by_n.empty()) throw SchemaMismatch("no rows in any report file");

  ordered_json j;
  j["files"] = paths.size();
  j["tolerance"] = tol;
  j["fraction"] = frac;
  j["rows"] = ordered_json::array();
  ordered_json final_row;
  for (const auto& [n, c] : by_n) {
    ordered_json row;
    row["n"] = n;
    row["count"] = c.stat.count();
    row["mean"] = c.stat.mean();
    row["stderr"] = c.stat.stderror();
    row["target"] = c.target ? ordered_json(*c.target) : ordered_json(nullptr);
    if (c.with_target > 0) {
      const double share =
          static_cast<double>(c.within) / static_cast<double>(c.with_target);
      row["share_within_tol"] = share;
      row["pass"] = share >= frac;
    } else {
      row["share_within_tol"] = nullptr;
      row["pass"] = nullptr;
    }
    final_row = row;
    j["rows"].push_back(std::move(row));
  }
  j["final_n"] = final_row["n"];
  j["passed"] = final_row["pass"];
  return j.dump(2) + "\n";
}

}  // namespace cantor
