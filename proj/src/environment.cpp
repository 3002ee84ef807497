#include "apgb/environment.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace apgb {

using json = nlohmann::json;

Eigen::MatrixXd cube_grid(int d, int m) {
  if (d <= 0 || m <= 0)
    throw std::invalid_argument("cube_grid: d and m must be positive");
  const long n = static_cast<long>(std::pow(static_cast<double>(m), d) + 0.5);
  Eigen::MatrixXd grid(n, d);
  for (long i = 0; i < n; ++i) {
    long rem = i;
    for (int k = d - 1; k >= 0; --k) {
      grid(i, k) = static_cast<double>(rem % m) / static_cast<double>(m);
      rem /= m;
    }
  }
  return grid;
}

Eigen::MatrixXd benchmark_grid(int d) {
  switch (d) {
    case 1: return cube_grid(1, 1000);
    case 2: return cube_grid(2, 30);
    case 3: return cube_grid(3, 10);
    default:
      throw std::invalid_argument("benchmark_grid: d must be 1, 2, or 3");
  }
}

double SyntheticEnv::f_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd c = translate_coeffs();
  double value = 0.0;
  for (Eigen::Index j = 0; j < centers.rows(); ++j)
    value += c[j] * kernel.at_distance((x.transpose() - centers.row(j)).norm());
  return value;
}

SyntheticEnv generate_env(const Kernel& kernel,
                          const Eigen::Ref<const Eigen::MatrixXd>& arms,
                          std::uint64_t seed, EnvOptions options) {
  const Eigen::Index n = arms.rows();
  if (n == 0) throw std::invalid_argument("generate_env: empty arm set");
  std::mt19937_64 rng(seed);

  // Gram-Schmidt in sampling order, tracked through the same incremental
  // Newton-style update as the greedy builder but with random pivots.
  using RowMajorMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const int cap = std::min<Eigen::Index>(options.max_centers, n);
  RowMajorMatrix values(n, cap);
  Eigen::MatrixXd transfer = Eigen::MatrixXd::Zero(cap, cap);
  Eigen::VectorXd p2 = Eigen::VectorXd::Constant(n, kernel.at_distance(0.0));
  std::vector<Eigen::Index> pool(n);
  for (Eigen::Index i = 0; i < n; ++i) pool[i] = i;
  std::vector<Eigen::Index> chosen;

  const double stop2 = options.power_stop * options.power_stop;
  while (static_cast<int>(chosen.size()) < cap && !pool.empty() &&
         p2.maxCoeff() >= stop2) {
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    const size_t slot = pick(rng);
    const Eigen::Index idx = pool[slot];
    pool[slot] = pool.back();
    pool.pop_back();
    // A draw whose power is already below the stopping level contributes a
    // nearly interpolated translate; normalizing by its tiny residual would
    // amplify roundoff, so skip it and draw again.
    if (p2[idx] < stop2) continue;

    const int m = static_cast<int>(chosen.size());
    const double inv_sq = 1.0 / std::sqrt(p2[idx]);
    const Eigen::VectorXd pivot_vals = values.row(idx).head(m);
    const Eigen::VectorXd pivot_point = arms.row(idx);
    for (Eigen::Index i = 0; i < n; ++i) {
      double u =
          kernel.at_distance((arms.row(i) - pivot_point.transpose()).norm());
      if (m > 0) u -= values.row(i).head(m).dot(pivot_vals);
      const double nv = u * inv_sq;
      values(i, m) = nv;
      p2[i] = std::max(0.0, p2[i] - nv * nv);
    }
    transfer(m, m) = inv_sq;
    for (int k = 0; k < m; ++k)
      transfer.row(m).head(m).noalias() -=
          pivot_vals[k] * inv_sq * transfer.row(k).head(m);
    chosen.push_back(idx);
  }
  if (chosen.empty())
    throw std::runtime_error("generate_env: could not select any center");

  const int m = static_cast<int>(chosen.size());
  Eigen::VectorXd coeffs(m);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < m; ++i) coeffs[i] = gauss(rng);
  coeffs.normalize();

  SyntheticEnv env{kernel,
                   arms,
                   Eigen::MatrixXd(m, arms.cols()),
                   transfer.topLeftCorner(m, m),
                   coeffs,
                   values.leftCols(m) * coeffs,
                   0.0,
                   0,
                   0.0,
                   0.0,
                   1.0,
                   seed};
  for (int i = 0; i < m; ++i) env.centers.row(i) = arms.row(chosen[i]);
  env.f_star = env.f.maxCoeff(&env.best_arm);
  const double abs_sum = env.f.array().abs().sum();
  env.l1_norm = options.l1_mode == L1Mode::Mean
                    ? abs_sum / static_cast<double>(n)
                    : abs_sum;
  env.noise_sigma =
      options.noise_override >= 0.0 ? options.noise_override : 0.2 * env.l1_norm;
  return env;
}

int AdversarialSeq::best_fixed_arm() const {
  Eigen::Index best = 0;
  total_reward_per_arm().maxCoeff(&best);
  return static_cast<int>(best);
}

Eigen::VectorXd AdversarialSeq::total_reward_per_arm() const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(segments.front().f.size());
  for (long t = 0; t < horizon; ++t) total += segment_at(t).f;
  return total;
}

AdversarialSeq generate_adversarial(const Kernel& kernel,
                                    const Eigen::Ref<const Eigen::MatrixXd>& arms,
                                    long horizon, long drift_period,
                                    std::uint64_t seed, EnvOptions options) {
  if (horizon < 1)
    throw std::invalid_argument("generate_adversarial: horizon must be >= 1");
  if (drift_period < 1)
    throw std::invalid_argument("generate_adversarial: drift_period >= 1");
  AdversarialSeq seq;
  seq.drift_period = drift_period;
  seq.horizon = horizon;
  const long n_segments = (horizon + drift_period - 1) / drift_period;
  std::mt19937_64 seeder(seed);
  for (long s = 0; s < n_segments; ++s)
    seq.segments.push_back(generate_env(kernel, arms, seeder(), options));
  return seq;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c =
      r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd out(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) out(i, j) = rows[i][j].get<double>();
  return out;
}

json kernel_to_json(const Kernel& k) {
  json j{{"family", to_string(k.family())},
         {"dim", k.dim()},
         {"lengthscale", k.lengthscale()}};
  if (k.family() == KernelFamily::RationalQuadratic) j["mu"] = k.rq_shape();
  if (k.family() == KernelFamily::Matern) j["nu"] = k.matern_nu();
  return j;
}

Kernel kernel_from_json(const json& j) {
  const KernelFamily family =
      kernel_family_from_string(j.at("family").get<std::string>());
  const int dim = j.at("dim").get<int>();
  const double l = j.at("lengthscale").get<double>();
  switch (family) {
    case KernelFamily::RationalQuadratic:
      return Kernel::rational_quadratic(dim, l, j.at("mu").get<double>());
    case KernelFamily::SquaredExponential:
      return Kernel::squared_exponential(dim, l);
    case KernelFamily::Matern:
      return Kernel::matern(dim, l, j.at("nu").get<double>());
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::string SyntheticEnv::serialize() const {
  json j{{"kernel", kernel_to_json(kernel)},
         {"arms", matrix_to_json(arms)},
         {"centers", matrix_to_json(centers)},
         {"transfer", matrix_to_json(transfer)},
         {"coeffs", std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size())},
         {"l1_norm", l1_norm},
         {"noise_sigma", noise_sigma},
         {"B", B},
         {"seed", seed}};
  return j.dump();
}

SyntheticEnv SyntheticEnv::deserialize(const std::string& text) {
  const json j = json::parse(text);
  SyntheticEnv env{kernel_from_json(j.at("kernel")),
                   matrix_from_json(j.at("arms")),
                   matrix_from_json(j.at("centers")),
                   matrix_from_json(j.at("transfer")),
                   Eigen::VectorXd(),
                   Eigen::VectorXd(),
                   0.0,
                   0,
                   j.at("l1_norm").get<double>(),
                   j.at("noise_sigma").get<double>(),
                   j.at("B").get<double>(),
                   j.at("seed").get<std::uint64_t>()};
  const auto c = j.at("coeffs").get<std::vector<double>>();
  env.coeffs = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
  // Recompute f at the arms from the translate expansion.
  const Eigen::MatrixXd cross = env.kernel.cross(env.arms, env.centers);
  env.f = cross * env.translate_coeffs();
  env.f_star = env.f.maxCoeff(&env.best_arm);
  return env;
}

}  // namespace apgb
