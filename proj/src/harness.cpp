#include "apgb/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace apgb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Formats doubles with enough digits to round-trip, so the CSVs are a
// deterministic function of the computed values alone.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T field_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + path + "': unexpected type (" +
                      std::string(j.type_name()) + ")");
  }
}

template <typename T>
void maybe_set(const json& j, const std::string& key, T& out) {
  if (j.contains(key)) out = field_as<T>(j.at(key), key);
}

KernelSpec kernel_spec_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config key '" + path + "': expected object");
  if (!j.contains("family"))
    throw ConfigError("config key '" + path + ".family': missing");
  KernelSpec spec;
  try {
    spec.family = kernel_family_from_string(
        field_as<std::string>(j.at("family"), path + ".family"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key '" + path + ".family': " + e.what());
  }
  if (!j.contains("l")) throw ConfigError("config key '" + path + ".l': missing");
  spec.lengthscale = field_as<double>(j.at("l"), path + ".l");
  maybe_set(j, "scale_with_sqrt_dim", spec.scale_with_sqrt_dim);
  maybe_set(j, "mu", spec.rq_shape);
  maybe_set(j, "mu_times_dim", spec.rq_shape_times_dim);
  maybe_set(j, "nu", spec.matern_nu);
  return spec;
}

json kernel_spec_to_json(const KernelSpec& spec) {
  json j;
  j["family"] = to_string(spec.family);
  j["l"] = spec.lengthscale;
  j["scale_with_sqrt_dim"] = spec.scale_with_sqrt_dim;
  if (spec.family == KernelFamily::RationalQuadratic) {
    j["mu"] = spec.rq_shape;
    j["mu_times_dim"] = spec.rq_shape_times_dim;
  }
  if (spec.family == KernelFamily::Matern) j["nu"] = spec.matern_nu;
  return j;
}

json config_to_json(const BenchConfig& cfg) {
  json j;
  json kernels = json::array();
  for (const auto& k : cfg.kernels) kernels.push_back(kernel_spec_to_json(k));
  j["kernels"] = kernels;
  j["dims"] = cfg.dims;
  j["algorithms"] = cfg.algorithms;
  j["T"] = cfg.T;
  j["n_envs"] = cfg.n_envs;
  j["base_seed"] = cfg.base_seed;
  j["arms_d1"] = cfg.arms_d1;
  j["q"] = cfg.q;
  j["alpha"] = cfg.alpha;
  j["lambda"] = cfg.lambda;
  j["delta"] = cfg.delta;
  j["B"] = cfg.B;
  j["design_tol"] = cfg.design_tol;
  j["l1_mode"] = cfg.l1_mode;
  j["drift_period"] = cfg.drift_period;
  // threads deliberately excluded: outputs must not depend on it.
  return j;
}

void apply_overrides(const json& j, BenchConfig& cfg) {
  for (const auto& [key, value] : j.items()) {
    if (key == "preset" || key == "threads") continue;
    if (key == "kernels") {
      if (!value.is_array()) throw ConfigError("config key 'kernels': expected array");
      cfg.kernels.clear();
      for (std::size_t i = 0; i < value.size(); ++i)
        cfg.kernels.push_back(kernel_spec_from_json(
            value[i], "kernels[" + std::to_string(i) + "]"));
    } else if (key == "dims") {
      cfg.dims = field_as<std::vector<int>>(value, key);
    } else if (key == "algorithms") {
      cfg.algorithms = field_as<std::vector<std::string>>(value, key);
    } else if (key == "T") {
      cfg.T = field_as<long>(value, key);
    } else if (key == "n_envs") {
      cfg.n_envs = field_as<int>(value, key);
    } else if (key == "base_seed") {
      cfg.base_seed = field_as<std::uint64_t>(value, key);
    } else if (key == "arms_d1") {
      cfg.arms_d1 = field_as<int>(value, key);
    } else if (key == "q") {
      cfg.q = field_as<double>(value, key);
    } else if (key == "alpha") {
      cfg.alpha = field_as<double>(value, key);
    } else if (key == "lambda") {
      cfg.lambda = field_as<double>(value, key);
    } else if (key == "delta") {
      cfg.delta = field_as<double>(value, key);
    } else if (key == "B") {
      cfg.B = field_as<double>(value, key);
    } else if (key == "design_tol") {
      cfg.design_tol = field_as<double>(value, key);
    } else if (key == "l1_mode") {
      cfg.l1_mode = field_as<std::string>(value, key);
      if (cfg.l1_mode != "mean" && cfg.l1_mode != "sum")
        throw ConfigError("config key 'l1_mode': expected \"mean\" or \"sum\"");
    } else if (key == "drift_period") {
      cfg.drift_period = field_as<long>(value, key);
    } else {
      throw ConfigError("config key '" + key + "': unknown key");
    }
  }
  if (j.contains("threads")) cfg.threads = field_as<int>(j.at("threads"), "threads");
}

void validate(const BenchConfig& cfg) {
  if (cfg.kernels.empty()) throw ConfigError("config key 'kernels': must be non-empty");
  if (cfg.dims.empty()) throw ConfigError("config key 'dims': must be non-empty");
  for (int d : cfg.dims)
    if (d < 1 || d > 3)
      throw ConfigError("config key 'dims': entries must be in {1, 2, 3}");
  if (cfg.algorithms.empty())
    throw ConfigError("config key 'algorithms': must be non-empty");
  for (const auto& a : cfg.algorithms)
    if (a != "apg-ucb" && a != "apg-pe" && a != "apg-ts" && a != "igp-ucb" &&
        a != "uniform")
      throw ConfigError("config key 'algorithms': unknown algorithm '" + a +
                        "' (expected apg-ucb, apg-pe, apg-ts, igp-ucb, uniform)");
  if (cfg.T < 1) throw ConfigError("config key 'T': must be >= 1");
  if (cfg.n_envs < 1) throw ConfigError("config key 'n_envs': must be >= 1");
  if (cfg.arms_d1 < 2) throw ConfigError("config key 'arms_d1': must be >= 2");
  if (cfg.q <= 0.0) throw ConfigError("config key 'q': must be > 0");
  if (cfg.alpha <= 0.0) throw ConfigError("config key 'alpha': must be > 0");
  if (cfg.lambda < 1.0) throw ConfigError("config key 'lambda': must be >= 1");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0)
    throw ConfigError("config key 'delta': must be in (0, 1)");
}

}  // namespace

Kernel KernelSpec::make(int dim) const {
  const double l =
      scale_with_sqrt_dim ? lengthscale * std::sqrt(static_cast<double>(dim))
                          : lengthscale;
  switch (family) {
    case KernelFamily::RationalQuadratic:
      return Kernel::rational_quadratic(
          dim, l, rq_shape_times_dim ? rq_shape * dim : rq_shape);
    case KernelFamily::SquaredExponential:
      return Kernel::squared_exponential(dim, l);
    case KernelFamily::Matern:
      return Kernel::matern(dim, l, matern_nu);
  }
  throw std::logic_error("unknown kernel family");
}

std::string KernelSpec::label() const {
  return to_string(family) + "_l" + trim_number(lengthscale);
}

Eigen::MatrixXd BenchConfig::grid(int d) const {
  if (d == 1) return cube_grid(1, arms_d1);
  return benchmark_grid(d);
}

L1Mode BenchConfig::l1() const {
  return l1_mode == "sum" ? L1Mode::Sum : L1Mode::Mean;
}

BenchConfig preset_config(const std::string& name) {
  BenchConfig cfg;
  KernelSpec rq;  // defaults are already RQ, mu = 2, l = 0.3 sqrt(d)
  KernelSpec se;
  se.family = KernelFamily::SquaredExponential;
  se.lengthscale = 0.2;

  if (name == "paper-rq-d1") {
    cfg.kernels = {rq};
  } else if (name == "paper-se-d1") {
    cfg.kernels = {se};
  } else if (name == "paper-full") {
    cfg.kernels = {rq, se};
    cfg.dims = {1, 2, 3};
  } else if (name == "reduced") {
    cfg.kernels = {rq, se};
    cfg.T = 2000;
    cfg.arms_d1 = 500;
    cfg.n_envs = 5;
  } else if (name == "smoke") {
    cfg.kernels = {rq};
    cfg.T = 10;
    cfg.arms_d1 = 50;
    cfg.n_envs = 2;
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (expected paper-rq-d1, paper-se-d1, paper-full, "
                      "reduced, smoke)");
  }
  return cfg;
}

BenchConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root: expected object");
  BenchConfig cfg;
  if (j.contains("preset"))
    cfg = preset_config(field_as<std::string>(j.at("preset"), "preset"));
  apply_overrides(j, cfg);
  validate(cfg);
  return cfg;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string canonical_config(const BenchConfig& cfg) {
  return config_to_json(cfg).dump();  // objects serialize with sorted keys
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const BenchConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config(cfg))));
  return buf;
}

double uniform_regret_scale(const SyntheticEnv& env) {
  return env.f_star - env.f.mean();
}

std::vector<double> normalize_curve(const std::vector<double>& cum_regret,
                                    double scale) {
  if (scale < 1e-12) {
    std::cerr << "warning: uniform-regret scale " << scale
              << " is ~0 (near-constant reward function); normalization skipped\n";
    return cum_regret;
  }
  std::vector<double> out(cum_regret.size());
  for (std::size_t i = 0; i < cum_regret.size(); ++i)
    out[i] = cum_regret[i] / scale;
  return out;
}

BenchCell make_bench_cell(const BenchConfig& cfg, const KernelSpec& spec,
                          int d) {
  BenchCell cell{spec.make(d), cfg.grid(d), {}, 0.0, {}};
  EnvOptions opts;
  opts.l1_mode = cfg.l1();
  // Seeds derive from (base_seed, kernel label, d, index) so every run is
  // reproducible independently of which cells the config enables.
  const std::uint64_t cell_tag =
      fnv1a64(spec.label() + "/d" + std::to_string(d));
  cell.envs.reserve(cfg.n_envs);
  cell.run_seeds.reserve(cfg.n_envs);
  for (int i = 0; i < cfg.n_envs; ++i) {
    const std::uint64_t env_seed =
        cfg.base_seed + cell_tag * 0x9e3779b97f4a7c15ull + 2ull * i;
    cell.envs.push_back(generate_env(cell.kernel, cell.arms, env_seed, opts));
    cell.run_seeds.push_back(env_seed + 1);
    cell.R += cell.envs.back().noise_sigma;
  }
  cell.R /= cfg.n_envs;
  return cell;
}

RunResult run_algorithm(const std::string& algorithm, const BenchConfig& cfg,
                        const Kernel& kernel, const SyntheticEnv& env,
                        double R, std::uint64_t seed) {
  StochasticProblem problem = StochasticProblem::from_env(env);
  if (algorithm == "igp-ucb") {
    IgpParams ip;
    ip.T = cfg.T;
    ip.B = cfg.B;
    ip.R = R;
    ip.delta = cfg.delta;
    return igp_ucb_run(kernel, env.arms, problem, ip, seed);
  }
  if (algorithm == "uniform") return uniform_random_run(problem, cfg.T, seed);

  ApgConfig ac;
  ac.T = cfg.T;
  ac.q = cfg.q;
  ac.alpha = cfg.alpha;
  ac.lambda = cfg.lambda;
  ac.R = R;
  ac.B = cfg.B;
  ac.delta = cfg.delta;
  ac.design_tol = cfg.design_tol;
  if (algorithm == "apg-ucb") ac.algorithm = Algorithm::UCB;
  else if (algorithm == "apg-pe") ac.algorithm = Algorithm::PE;
  else if (algorithm == "apg-ts") ac.algorithm = Algorithm::TS;
  else throw ConfigError("unknown algorithm '" + algorithm + "'");
  return apg_run(ac, kernel, env.arms, problem, seed);
}

BenchOutcome bench_paper(const BenchConfig& cfg, const std::string& out_dir) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  const std::string hash = config_hash(cfg);
  fs::create_directories(out_dir);

  BenchOutcome outcome;
  std::ofstream timing(fs::path(out_dir) / "timing.txt");
  timing << "# config_hash=" << hash << "\n";
  timing << "# mean wall-clock seconds over " << cfg.n_envs
         << " runs; total = setup + loop\n";
  timing << "kernel  d  algorithm  setup_s  loop_s  total_s\n";

  std::ofstream plot(fs::path(out_dir) / "plot.gp");
  plot << "# config_hash=" << hash << "\n";
  plot << "set datafile separator ','\nset key left top\n";
  plot << "set xlabel 'round'\nset ylabel 'normalized cumulative regret'\n";

  for (const auto& spec : cfg.kernels) {
    for (int d : cfg.dims) {
      const std::string cell_name = spec.label() + "_d" + std::to_string(d);
      fs::create_directories(fs::path(out_dir) / cell_name);
      BenchCell cell = make_bench_cell(cfg, spec, d);

      // mean normalized cumulative regret per algorithm, over succeeding runs
      std::vector<std::vector<double>> mean_curves;
      std::vector<std::string> mean_names;

      for (const auto& alg : cfg.algorithms) {
        std::vector<double> mean_curve(cfg.T, 0.0);
        int ok = 0;
        double setup_acc = 0.0, loop_acc = 0.0;
        for (int i = 0; i < cfg.n_envs; ++i) {
          RunSummary sum;
          sum.kernel_label = spec.label();
          sum.d = d;
          sum.algorithm = alg;
          sum.seed = cell.run_seeds[i];
          try {
            RunResult res = run_algorithm(alg, cfg, cell.kernel, cell.envs[i],
                                          cell.R, cell.run_seeds[i]);
            auto cum = res.cumulative_regret();
            auto norm = normalize_curve(cum, uniform_regret_scale(cell.envs[i]));
            const fs::path run_path = fs::path(out_dir) / cell_name /
                                      (alg + "_env" + std::to_string(i) + ".csv");
            std::ofstream out(run_path);
            out << "# config_hash=" << hash << " seed=" << sum.seed << "\n";
            out << "round,arm,inst_regret,cum_regret,norm_cum_regret\n";
            for (std::size_t t = 0; t < cum.size(); ++t)
              out << t << ',' << res.arms[t] << ',' << fmt(res.inst_regret[t])
                  << ',' << fmt(cum[t]) << ',' << fmt(norm[t]) << '\n';
            outcome.files.push_back(run_path.string());

            for (long t = 0; t < cfg.T && t < static_cast<long>(norm.size()); ++t)
              mean_curve[t] += norm[t];
            ++ok;
            setup_acc += res.setup_seconds;
            loop_acc += res.loop_seconds;
            sum.basis_size = res.basis_size;
            sum.final_cum_regret = cum.back();
            sum.final_norm_regret = norm.back();
            sum.setup_seconds = res.setup_seconds;
            sum.loop_seconds = res.loop_seconds;
          } catch (const std::exception& e) {
            sum.failed = true;
            sum.error = e.what();
            std::cerr << "run failed (" << cell_name << ", " << alg << ", env "
                      << i << "): " << e.what() << "\n";
            outcome.exit_code = 1;
          }
          outcome.runs.push_back(std::move(sum));
        }
        if (ok > 0) {
          for (auto& v : mean_curve) v /= ok;
          mean_curves.push_back(std::move(mean_curve));
          mean_names.push_back(alg);
          timing << spec.label() << "  " << d << "  " << alg << "  "
                 << setup_acc / ok << "  " << loop_acc / ok << "  "
                 << (setup_acc + loop_acc) / ok << "\n";
        }
      }

      const fs::path mean_path = fs::path(out_dir) / cell_name / "mean.csv";
      std::ofstream mean_out(mean_path);
      mean_out << "# config_hash=" << hash << "\n";
      mean_out << "round";
      for (const auto& n : mean_names) mean_out << ',' << n;
      mean_out << '\n';
      for (long t = 0; t < cfg.T; ++t) {
        mean_out << t;
        for (const auto& curve : mean_curves) mean_out << ',' << fmt(curve[t]);
        mean_out << '\n';
      }
      outcome.files.push_back(mean_path.string());

      plot << "plot";
      for (std::size_t i = 0; i < mean_names.size(); ++i)
        plot << (i ? ", " : " ") << "'" << cell_name << "/mean.csv' using 1:"
             << i + 2 << " with lines title '" << mean_names[i] << "'";
      plot << "\npause -1\n";
    }
  }
  return outcome;
}

}  // namespace apgb
