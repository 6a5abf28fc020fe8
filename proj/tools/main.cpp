#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cantor/cli_run.hpp"

namespace {

cantor::ExperimentConfig cfg;
std::string grid_text;

void add_output(CLI::App* sub, const char* default_format) {
  sub->add_option("-o,--out", cfg.output, "Output file (default: stdout)");
  sub->add_option("-f,--format", cfg.format, "Output format")
      ->default_str(default_format);
  sub->add_flag("--verbose", cfg.verbose, "Progress notes on stderr");
}

void add_model(CLI::App* sub, bool required = true) {
  auto* opt = sub->add_option("-m,--model", cfg.model_file,
                              "Model specification file (JSON)");
  if (required) opt->required();
}

void add_grid(CLI::App* sub) {
  sub->add_option("--grid", grid_text,
                  "Evaluation grid start:factor:count (default 256:2:10, "
                  "capped at --n)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Cylinder-measure laboratory: entropy, conditional informations, "
      "orbit statistics, and compression diagnostics for computable "
      "measures on infinite binary sequences"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  auto* sample = app.add_subcommand("sample", "Draw prefixes from a model");
  add_model(sample, false);
  sample->add_option("-n,--n", cfg.n, "Prefix length")->required();
  sample->add_option("--seed", cfg.seed, "Stream seed");
  sample->add_option("--replicas", cfg.replicas, "Independent sequences");
  sample->add_option("--adversarial", cfg.adversarial,
                     "Non-random control: all_zeros, coinflips, or "
                     "periodic:PATTERN (replaces --model)");
  add_output(sample, "ascii");

  auto* entropy =
      app.add_subcommand("entropy", "Block entropies and the rate estimators");
  add_model(entropy);
  entropy->add_option("-n,--n", cfg.n, "Largest block length")->required();
  add_output(entropy, "csv");

  auto* smb = app.add_subcommand(
      "smb-report", "Per-symbol information rate of sampled prefixes");
  add_model(smb);
  smb->add_option("-n,--n", cfg.n, "Prefix length")->required();
  smb->add_option("--seed", cfg.seed, "Stream seed");
  smb->add_option("--replicas", cfg.replicas, "Independent sequences");
  add_grid(smb);
  add_output(smb, "csv");

  auto* fk = app.add_subcommand(
      "fk", "Conditional informations f_0..f_K of sampled prefixes");
  add_model(fk);
  fk->add_option("-n,--n", cfg.n, "Prefix length")->required();
  fk->add_option("-K,--K", cfg.K, "Truncation (default n-1)");
  fk->add_option("--seed", cfg.seed, "Stream seed");
  fk->add_option("--replicas", cfg.replicas, "Independent sequences");
  add_output(fk, "csv");

  auto* dim = app.add_subcommand(
      "dimension", "Compression-rate curve and dimension proxies");
  add_model(dim, false);
  dim->add_option("-n,--n", cfg.n, "Prefix length (defaults to the input)");
  dim->add_option("--coder", cfg.coder, "lz78 or ideal")->default_str("lz78");
  dim->add_option("--input", cfg.input, "Sequence file instead of sampling");
  dim->add_option("--input-format", cfg.input_format, "ascii or bits")
      ->default_str("ascii");
  dim->add_option("--tail-fraction", cfg.tail_fraction,
                  "Grid fraction used for the proxies")
      ->default_str("0.25");
  dim->add_option("--seed", cfg.seed, "Stream seed");
  dim->add_option("--replicas", cfg.replicas, "Independent sequences");
  add_grid(dim);
  add_output(dim, "csv");

  auto* defc = app.add_subcommand(
      "deficiency", "Ideal-versus-compressor code-length trace");
  add_model(defc);
  defc->add_option("-n,--n", cfg.n, "Prefix length (defaults to the input)");
  defc->add_option("--input", cfg.input, "Sequence file instead of sampling");
  defc->add_option("--input-format", cfg.input_format, "ascii or bits")
      ->default_str("ascii");
  defc->add_option("--seed", cfg.seed, "Stream seed");
  defc->add_option("--replicas", cfg.replicas, "Independent sequences");
  add_grid(defc);
  add_output(defc, "csv");

  auto* inv = app.add_subcommand(
      "invariance", "Exhaustive shift-invariance check of a model");
  add_model(inv);
  inv->add_option("--depth", cfg.depth, "Largest word length (max 22)")
      ->default_str("12");
  inv->add_option("--tol", cfg.tol, "Violation tolerance")
      ->default_str("1e-10");
  add_output(inv, "csv");

  auto* corr = app.add_subcommand(
      "correlation", "Cesaro correlation averages against the product target");
  add_model(corr);
  corr->add_option("--u", cfg.u, "First cylinder word")->required();
  corr->add_option("--v", cfg.v, "Second cylinder word")->required();
  corr->add_option("-n,--n", cfg.n, "Number of Cesaro terms")->required();
  corr->add_flag("--monte-carlo", cfg.force_monte_carlo,
                 "Force the sampling estimator");
  corr->add_option("--samples", cfg.samples, "Monte Carlo sample count");
  corr->add_option("--seed", cfg.seed, "Monte Carlo seed");
  add_output(corr, "csv");

  auto* summ = app.add_subcommand(
      "summarize", "Aggregate convergence reports into one verdict");
  summ->add_option("inputs", cfg.inputs, "Report CSV files")->required();
  summ->add_option("--tol", cfg.tol, "Closeness tolerance")->required();
  summ->add_option("--frac", cfg.frac,
                   "Required fraction of rows within tolerance")
      ->default_str("0.95");
  add_output(summ, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* active = app.get_subcommands().front();
  cfg.command = active->get_name();
  if (active->count("--format") == 0) {
    if (cfg.command == "sample") {
      cfg.format = "ascii";
    } else if (cfg.command == "summarize") {
      cfg.format = "json";
    } else {
      cfg.format = "csv";
    }
  }
  const CLI::Option* grid_opt = active->get_option_no_throw("--grid");
  if (grid_opt != nullptr && grid_opt->count() > 0) {
    try {
      cfg.grid = cantor::parse_grid_spec(grid_text);
      cfg.grid_given = true;
    } catch (const std::invalid_argument& e) {
      std::cerr << "{\"error\":\"invalid_argument\",\"detail\":\"" << e.what()
                << "\"}\n";
      return 2;
    }
  }
  return cantor::run_experiment(cfg, std::cerr);
}
