// Benchmark CLI: P-greedy basis diagnostics, G-optimal design debugging,
// single runs, the full benchmark matrix, and adversarial experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "apgb/design.hpp"
#include "apgb/harness.hpp"
#include "apgb/newton_basis.hpp"
#include "apgb/rkhs_bandits.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace apgb;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool seed_set = false;
  int threads = 0;
};

BenchConfig resolve_config(const GlobalArgs& g) {
  BenchConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  else if (!g.preset.empty()) cfg = preset_config(g.preset);
  if (g.seed_set) cfg.base_seed = g.seed;
  if (g.threads > 0) cfg.threads = g.threads;
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  return cfg;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_basis(const GlobalArgs& g, int dim) {
  BenchConfig cfg = resolve_config(g);
  fs::create_directories(g.out_dir);
  const std::string hash = config_hash(cfg);
  const double e = cfg.alpha / std::pow(static_cast<double>(cfg.T), cfg.q);
  for (const auto& spec : cfg.kernels) {
    Kernel kernel = spec.make(dim);
    Eigen::MatrixXd arms = cfg.grid(dim);
    NewtonBasis basis = build_basis(kernel, arms, e);
    DecayReport decay = decay_diagnostics(basis);

    fs::path path = fs::path(g.out_dir) /
                    (spec.label() + "_d" + std::to_string(dim) + "_basis.csv");
    std::ofstream out(path);
    out << "# config_hash=" << hash << " admissible_error=" << fmt(e) << "\n";
    out << "iteration,max_P2";
    for (int j = 0; j < dim; ++j) out << ",x" << j;
    out << "\n";
    for (int m = 0; m < basis.size(); ++m) {
      out << m + 1 << ',' << fmt(basis.residual_trace[m]);
      for (int j = 0; j < dim; ++j) out << ',' << fmt(basis.points(m, j));
      out << '\n';
    }
    std::cout << spec.label() << " d=" << dim << ": " << basis.size()
              << " points (e=" << e << ", truncated=" << basis.truncated
              << ")\n  decay fits: exp slope " << decay.exp_slope
              << " (r2 " << decay.exp_r2 << "), poly slope " << decay.poly_slope
              << " (r2 " << decay.poly_r2 << ")\n  wrote " << path.string()
              << "\n";
  }
  return 0;
}

int cmd_design(const GlobalArgs& g, int dim) {
  BenchConfig cfg = resolve_config(g);
  const double e = cfg.alpha / std::pow(static_cast<double>(cfg.T), cfg.q);
  for (const auto& spec : cfg.kernels) {
    Kernel kernel = spec.make(dim);
    Eigen::MatrixXd arms = cfg.grid(dim);
    NewtonBasis basis = build_basis(kernel, arms, e);
    Eigen::MatrixXd features = basis.features_of(arms);
    Design design = g_optimal_design(features, cfg.design_tol);
    int support = 0;
    for (Eigen::Index i = 0; i < design.weights.size(); ++i)
      if (design.weights(i) > 1e-9) ++support;
    std::cout << spec.label() << " d=" << dim << ": D=" << features.cols()
              << " max leverage=" << design.leverage_max << " (target <= "
              << features.cols() * (1.0 + cfg.design_tol) << "), support="
              << support << ", converged=" << design.converged << "\n";
  }
  return 0;
}

int cmd_run(const GlobalArgs& g, const std::string& algorithm, int dim) {
  BenchConfig cfg = resolve_config(g);
  fs::create_directories(g.out_dir);
  const std::string hash = config_hash(cfg);
  const auto& spec = cfg.kernels.front();
  BenchConfig one = cfg;
  one.n_envs = 1;
  BenchCell cell = make_bench_cell(one, spec, dim);
  RunResult res = run_algorithm(algorithm, cfg, cell.kernel, cell.envs[0],
                                cell.R, cell.run_seeds[0]);
  auto cum = res.cumulative_regret();
  auto norm = normalize_curve(cum, uniform_regret_scale(cell.envs[0]));

  fs::path path = fs::path(g.out_dir) / (algorithm + "_" + spec.label() + "_d" +
                                         std::to_string(dim) + ".csv");
  std::ofstream out(path);
  out << "# config_hash=" << hash << " seed=" << cell.run_seeds[0] << "\n";
  out << "round,arm,inst_regret,cum_regret,norm_cum_regret\n";
  for (std::size_t t = 0; t < cum.size(); ++t)
    out << t << ',' << res.arms[t] << ',' << fmt(res.inst_regret[t]) << ','
        << fmt(cum[t]) << ',' << fmt(norm[t]) << '\n';
  std::cout << algorithm << " on " << spec.label() << " d=" << dim << ": R("
            << cum.size() << ")=" << cum.back() << " normalized "
            << norm.back() << ", basis=" << res.basis_size << ", setup "
            << res.setup_seconds << "s loop " << res.loop_seconds
            << "s\n  wrote " << path.string() << "\n";
  return 0;
}

int cmd_bench(const GlobalArgs& g) {
  BenchConfig cfg = resolve_config(g);
  BenchOutcome outcome = bench_paper(cfg, g.out_dir);
  int ok = 0, failed = 0;
  for (const auto& r : outcome.runs) (r.failed ? failed : ok)++;
  std::cout << "bench: " << ok << " runs ok, " << failed << " failed; outputs in "
            << g.out_dir << " (config_hash=" << config_hash(cfg) << ")\n";
  return outcome.exit_code;
}

int cmd_adv(const GlobalArgs& g, int dim, int n_arms, long drift) {
  BenchConfig cfg = resolve_config(g);
  fs::create_directories(g.out_dir);
  const auto& spec = cfg.kernels.front();
  Kernel kernel = spec.make(dim);
  Eigen::MatrixXd arms = cube_grid(dim, n_arms);
  EnvOptions opts;
  opts.l1_mode = cfg.l1();
  AdversarialSeq seq = generate_adversarial(kernel, arms, cfg.T,
                                            drift > 0 ? drift : cfg.drift_period,
                                            cfg.base_seed, opts);
  ApgConfig ac;
  ac.algorithm = Algorithm::EXP3;
  ac.T = cfg.T;
  ac.q = cfg.q;
  ac.alpha = cfg.alpha;
  ac.B = cfg.B;
  ac.delta = cfg.delta;
  ac.design_tol = cfg.design_tol;
  RunResult res = apg_exp3_run(ac, kernel, arms, seq, cfg.base_seed + 1);
  auto cum = res.cumulative_regret();

  fs::path path = fs::path(g.out_dir) /
                  (spec.label() + "_d" + std::to_string(dim) + "_adv.csv");
  std::ofstream out(path);
  out << "# config_hash=" << config_hash(cfg) << " seed=" << cfg.base_seed + 1
      << "\n";
  out << "round,arm,inst_regret,cum_regret\n";
  for (std::size_t t = 0; t < cum.size(); ++t)
    out << t << ',' << res.arms[t] << ',' << fmt(res.inst_regret[t]) << ','
        << fmt(cum[t]) << '\n';
  std::cout << "exp3 vs best fixed arm: R(" << cum.size() << ")=" << cum.back()
            << " (" << cum.back() / static_cast<double>(cum.size())
            << " per round), basis=" << res.basis_size << "\n  wrote "
            << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernelized bandit benchmark toolkit"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--preset", g.preset,
                 "built-in preset (paper-rq-d1, paper-se-d1, paper-full, "
                 "reduced, smoke)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "base RNG seed");
  app.add_option("--threads", g.threads, "OpenMP thread count (0 = default)");

  int dim = 1;
  int adv_arms = 10;
  long adv_drift = 0;
  std::string run_alg = "apg-ucb";

  auto* basis = app.add_subcommand("basis", "P-greedy basis diagnostics");
  basis->add_option("-d,--dim", dim, "grid dimension");
  auto* design = app.add_subcommand("design", "G-optimal design debug");
  design->add_option("-d,--dim", dim, "grid dimension");
  auto* run = app.add_subcommand("run", "single algorithm on one environment");
  run->add_option("-d,--dim", dim, "grid dimension");
  run->add_option("-a,--algorithm", run_alg,
                  "apg-ucb | apg-pe | apg-ts | igp-ucb | uniform");
  app.add_subcommand("bench", "full benchmark matrix");
  auto* adv = app.add_subcommand("adv", "adversarial EXP3 experiment");
  adv->add_option("-d,--dim", dim, "grid dimension");
  adv->add_option("--arms", adv_arms, "arms per dimension");
  adv->add_option("--drift", adv_drift, "rounds per adversary segment");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    if (basis->parsed()) return cmd_basis(g, dim);
    if (design->parsed()) return cmd_design(g, dim);
    if (run->parsed()) return cmd_run(g, run_alg, dim);
    if (adv->parsed()) return cmd_adv(g, dim, adv_arms, adv_drift);
    return cmd_bench(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
