#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apgb/environment.hpp"
#include "apgb/kernel.hpp"
#include "apgb/rkhs_bandits.hpp"

namespace apgb {

/// Malformed configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::RationalQuadratic;
  double lengthscale = 0.3;
  bool scale_with_sqrt_dim = true;  // effective l = lengthscale * sqrt(d)
  double rq_shape = 2.0;
  bool rq_shape_times_dim = true;  // effective mu = rq_shape * d
  double matern_nu = 2.5;

  Kernel make(int dim) const;
  std::string label() const;  // e.g. "rq_l0.3"
};

struct BenchConfig {
  std::vector<KernelSpec> kernels;
  std::vector<int> dims{1};
  std::vector<std::string> algorithms{"apg-ucb", "igp-ucb"};
  long T = 5000;
  int n_envs = 10;
  std::uint64_t base_seed = 1;
  int arms_d1 = 1000;  // d = 1 grid size; d = 2, 3 always use 30^2, 10^3
  double q = 0.5;
  double alpha = 5e-3;
  double lambda = 1.0;
  double delta = 1e-3;
  double B = 1.0;
  double design_tol = 0.01;
  std::string l1_mode = "mean";
  long drift_period = 500;  // adversarial runs only
  int threads = 0;          // 0 keeps the OpenMP default

  Eigen::MatrixXd grid(int d) const;
  L1Mode l1() const;
};

/// Built-in presets: "paper-rq-d1", "paper-se-d1", "paper-full",
/// "reduced" (T = 2000, |A| = 500, 5 environments), "smoke" (T = 10).
BenchConfig preset_config(const std::string& name);

/// JSON config file. An optional "preset" key seeds the defaults; every other
/// key overrides. Errors name the offending key path.
BenchConfig load_config(const std::string& path);
BenchConfig config_from_json_text(const std::string& text);

/// Canonical serialization (sorted keys) and its FNV-1a hash; the hash is
/// embedded in every output file header.
std::string canonical_config(const BenchConfig& cfg);
std::uint64_t fnv1a64(std::string_view data);
std::string config_hash(const BenchConfig& cfg);

/// Expected per-round regret of uniform random play, f(x*) - mean_x f(x);
/// the normalization divisor.
double uniform_regret_scale(const SyntheticEnv& env);

/// Divide cumulative regret by `scale`. A scale below 1e-12 skips
/// normalization with a warning on stderr and returns the input unchanged.
std::vector<double> normalize_curve(const std::vector<double>& cum_regret,
                                    double scale);

struct RunSummary {
  std::string kernel_label;
  int d = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  int basis_size = 0;
  double final_cum_regret = 0.0;
  double final_norm_regret = 0.0;
  double setup_seconds = 0.0;
  double loop_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct BenchOutcome {
  int exit_code = 0;  // 0 success, 1 at least one run failed
  std::vector<RunSummary> runs;
  std::vector<std::string> files;
};

/// For each (kernel, d): generates n_envs environments, derives the shared
/// noise bound R as the average noise level across them, runs every
/// configured algorithm, and writes per-run CSVs, a mean normalized-regret
/// curve CSV, a timing summary (timing.txt, the only file carrying wall-clock
/// numbers), and a gnuplot script. Run failures are recorded and skipped.
BenchOutcome bench_paper(const BenchConfig& cfg, const std::string& out_dir);

/// The environments and deterministic per-run inputs bench_paper would use
/// for one (kernel, d) cell; exposed so tests can run the same matrix
/// without file output.
struct BenchCell {
  Kernel kernel;
  Eigen::MatrixXd arms;
  std::vector<SyntheticEnv> envs;
  double R = 0.0;  // average env noise level
  std::vector<std::uint64_t> run_seeds;
};
BenchCell make_bench_cell(const BenchConfig& cfg, const KernelSpec& spec,
                          int d);

/// Runs one algorithm ("apg-ucb", "apg-pe", "apg-ts", "igp-ucb", "uniform")
/// on one environment with the cell-level R.
RunResult run_algorithm(const std::string& algorithm, const BenchConfig& cfg,
                        const Kernel& kernel, const SyntheticEnv& env,
                        double R, std::uint64_t seed);

}  // namespace apgb
