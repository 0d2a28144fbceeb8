#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbbp/sampling.hpp"
#include "sbbp/stepsize.hpp"

namespace sbbp {

// Raised on malformed or invalid experiment configs (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { LfpParams, LfpBlocksize, LfpCompare, SfpNoise, Custom };

// One flat key/value config document drives one experiment; see README for
// the key reference. Defaults follow the standard protocol: lambda = 1,
// trials = 50, record_every = 10.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Custom;
  // instance
  int m = 0;
  int n = 0;
  int s = 20;
  int total_rows = 800;  // key "M" (SFP)
  int xi = 10;
  double sigma = 0.1;
  bool consistent = true;
  // protocol
  int tau = 20;
  double lambda = 1.0;
  double c = 0.2;
  double gamma_b = 100.0;
  std::string schedule = "auto";  // constant | invsqrt | auto
  std::string vary = "c";        // lfp_params: c | gamma_b
  std::string family = "lfp";    // custom: lfp | sfp
  std::string stepsize = "exact";   // custom: decmsps | exact | block
  std::string kernel_name = "elastic";  // custom: elastic | euclidean
  std::string sampling = "uniform";     // custom: uniform | partition
  int trials = 50;
  std::uint64_t base_seed = 1;
  long max_iters = 20000;
  double tol_rel_err = 1e-10;
  long record_every = 10;
  std::string output = "out";
};

ExperimentConfig parse_config(const std::string& text);
std::string canonical_config(const ExperimentConfig& config);

// One solver setup evaluated across all trials; tau <= 0 requests the
// optimal block size computed per instance.
struct CurveSpec {
  std::string name;
  StepsizeRule rule;
  Kernel kernel = Kernel::euclidean();
  SamplingMode sampling = SamplingMode::UniformNoReplacement;
  int tau = 1;
};

std::vector<CurveSpec> build_curves(const ExperimentConfig& config);

struct ExperimentOutcome {
  int aborted_trials = 0;
  std::vector<std::string> abort_messages;
};

// Runs trials (concurrently when threads != 1) and writes into the output
// directory: config.json (canonical echo), long.csv
// (curve,trial,k,metric,value), summary.csv with per-curve median iteration
// counts, and errors.txt when trials aborted. Trial t uses seed base_seed+t
// for both the instance and the sampling stream; outputs are byte-identical
// across thread counts (the CPU-time column of summary.csv is informational
// and excluded from that guarantee).
ExperimentOutcome run_experiment(const ExperimentConfig& config, int threads = 0);

// Renders an aligned comparison table over the given output directories and
// writes per-curve plot data files plots/<curve>__<metric>.csv (k,median_value)
// into each directory.
std::string report(const std::vector<std::string>& out_dirs);

// Median with the even-count convention (mean of the two central values).
double median(std::vector<double> values);

}  // namespace sbbp
