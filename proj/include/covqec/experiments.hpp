#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covqec/symmetry_rep.hpp"

namespace covqec {

// Problems with a config file (unknown key, missing seed, bad value).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A bound check failed. The CLI maps this to exit code 4.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  scaling,
  mc_u1,
  mc_sud,
  minentropy_verify,
  decoupling,
  sud_average,
  worst_input,
};

const char* kind_name(ExperimentKind kind);

// alpha = 7 fixes the ancilla weight; alpha = n/3 (or ratio:0.333) scales it
// with the grid.
struct AlphaRule {
  bool is_ratio = false;
  double ratio = 0.0;
  long long constant = 0;

  long long value_for(long long n) const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::scaling;
  std::vector<long long> n_values;
  int k = 1;
  int t = 1;
  int d = 2;
  AlphaRule alpha;
  Partition lambda;        // explicit shape for mc-sud at a single n
  bool lambda_single_row = false;  // "lambda = row": one row of n-1 boxes
  int psi_index = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
  std::string zeta = "marginal";
  std::string metric = "all";
};

// Flat key-value text: one `key = value` per line, `#` comments. Unknown keys
// and keys that do not apply to the declared kind are errors, as is a missing
// seed. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);

struct ResultRow {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;  // declared order
  std::string metric;
  double value = 0.0;
  double stderr_value = 0.0;  // NaN for closed-form rows
  long long samples = 0;      // 0 for closed-form rows
  std::uint64_t seed = 0;
};

// Runs the experiment on `threads` workers. Sample s of grid point g uses the
// sub-seed derived from (config seed, g * samples + s), so row values do not
// depend on the thread count or completion order.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int threads);

// CSV columns: experiment, the kind's parameter columns, metric, value,
// stderr (empty unless Monte Carlo), samples, seed. Written via .tmp + rename.
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);

// JSON sidecar: config echo, FNV-1a hash of the raw config bytes, row count,
// and log-log slope fits per metric when the grid has enough points.
void write_summary(const std::vector<ResultRow>& rows, const ExperimentConfig& config,
                   const std::string& config_text, const std::string& path);

struct BoundCheck {
  std::string tag;
  double computed = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - computed; negative means violated
  bool pass = false;
};

// Theorem-level checks appropriate to the config's kind. Callers decide how
// to report; render_checks gives the fixed-width text form.
std::vector<BoundCheck> verify_bounds(const ExperimentConfig& config, int threads);
std::string render_checks(const std::vector<BoundCheck>& checks);

}  // namespace covqec
