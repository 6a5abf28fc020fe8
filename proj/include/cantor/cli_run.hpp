#ifndef CANTOR_CLI_RUN_HPP
#define CANTOR_CLI_RUN_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cantor {

// Geometric grid start, start*factor, ... (count values, rounded, deduped).
struct GridSpec {
  std::uint64_t start = 256;
  double factor = 2.0;
  std::size_t count = 10;
};

std::vector<std::uint64_t> make_grid(const GridSpec& g);
// Grid values capped at n, with n itself appended when missing.
std::vector<std::uint64_t> make_grid_upto(const GridSpec& g, std::uint64_t n);
GridSpec parse_grid_spec(const std::string& text);  // "start:factor:count"

// One reproducible experiment: seed and replicas fully determine every
// stochastic output, and rerunning a config reproduces byte-identical files.
struct ExperimentConfig {
  std::string command;  // sample|entropy|smb-report|fk|dimension|deficiency|
                        // invariance|correlation|summarize
  std::string model_file;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 1;
  GridSpec grid;
  bool grid_given = false;
  std::string output;  // empty -> stdout
  std::string format = "csv";  // csv|json; sample: ascii|bits

  // command-specific knobs
  std::string u, v;                  // correlation cylinders
  int depth = 12;                    // invariance
  double tol = 1e-10;                // invariance / summarize threshold
  int K = -1;                        // fk truncation (-1: n-1)
  std::string coder = "lz78";        // dimension: lz78|ideal
  double tail_fraction = 0.25;       // dimension
  std::string input;                 // dimension/deficiency sequence file
  std::string input_format = "ascii";  // ascii|bits
  std::string adversarial;           // sample: all_zeros|periodic:PAT|coinflips
  std::uint64_t samples = 10000;     // correlation Monte Carlo
  bool force_monte_carlo = false;    // correlation
  double frac = 0.95;                // summarize pass fraction
  std::vector<std::string> inputs;   // summarize report files
  bool verbose = false;
};

// Exit codes: 0 success, 2 validation failure, 3 budget exceeded, 4 I/O
// failure. Failures emit a one-line JSON error record on err.
int run_experiment(const ExperimentConfig& cfg, std::ostream& err);

// Aggregates convergence CSVs sharing one schema: per-n mean, standard
// error, and pass/fail against the declared tolerance and fraction.
std::string summarize_reports(const std::vector<std::string>& paths, double tol,
                              double frac);

}  // namespace cantor

#endif
