#include "apgb/rkhs_bandits.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "apgb/design.hpp"
#include "apgb/exp3.hpp"
#include "apgb/lin_bandit.hpp"
#include "apgb/linalg_util.hpp"
#include "apgb/phased_elim.hpp"

namespace apgb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Features may be rank-deficient when the basis was truncated early. PE and
// EXP3 both need a nonsingular design matrix, so rotate onto the top singular
// subspace first; UCB/TS tolerate the deficiency through the ridge.
Eigen::MatrixXd reduce_rank(const Eigen::MatrixXd& features) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(features,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double floor = 1e-10 * sv(0);
  int r = 0;
  while (r < sv.size() && sv(r) > floor) ++r;
  if (r == 0) throw std::runtime_error("feature matrix is numerically zero");
  if (r == features.cols()) return features;
  return features * svd.matrixV().leftCols(r);
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::UCB: return "ucb";
    case Algorithm::PE: return "pe";
    case Algorithm::TS: return "ts";
    case Algorithm::EXP3: return "exp3";
  }
  throw std::logic_error("unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "ucb") return Algorithm::UCB;
  if (name == "pe") return Algorithm::PE;
  if (name == "ts") return Algorithm::TS;
  if (name == "exp3") return Algorithm::EXP3;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::vector<double> RunResult::cumulative_regret() const {
  std::vector<double> cum(inst_regret.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < inst_regret.size(); ++i) {
    acc += inst_regret[i];
    cum[i] = acc;
  }
  return cum;
}

RunResult apg_run(const ApgConfig& cfg, const Kernel& kernel,
                  const Eigen::Ref<const Eigen::MatrixXd>& arms,
                  const StochasticProblem& problem, std::uint64_t seed) {
  if (cfg.algorithm == Algorithm::EXP3)
    throw std::invalid_argument("apg_run handles stochastic algorithms only");
  const int n_arms = static_cast<int>(arms.rows());
  if (problem.true_means.size() != n_arms)
    throw std::invalid_argument("true_means size mismatch");

  RunResult out;
  auto t0 = Clock::now();

  NewtonBasis basis = build_basis(kernel, arms, cfg.admissible_error(),
                                  cfg.max_basis_points, cfg.exec);
  out.basis_size = static_cast<int>(basis.points.rows());
  out.basis_truncated = basis.truncated;

  Eigen::MatrixXd features = basis.features_of(arms, cfg.exec);
  const double eps = cfg.B * cfg.admissible_error();
  const double best = problem.true_means.maxCoeff();

  std::mt19937_64 rng(seed);
  out.arms.reserve(cfg.T);
  out.inst_regret.reserve(cfg.T);
  auto record = [&](int arm, double /*reward*/) {
    out.arms.push_back(arm);
    out.inst_regret.push_back(best - problem.true_means(arm));
  };

  if (cfg.algorithm == Algorithm::PE) {
    features = reduce_rank(features);
    PhasedElimination::Params pp;
    pp.delta = cfg.delta;
    pp.noise_scale = cfg.R;
    pp.design_tol = cfg.design_tol;
    PhasedElimination pe(features, pp, cfg.exec);
    out.setup_seconds = seconds_since(t0);
    auto t1 = Clock::now();
    pe.run(
        cfg.T, [&](int arm) { return problem.pull(arm, rng); },
        [&](long /*round*/, int arm) { record(arm, 0.0); });
    out.loop_seconds = seconds_since(t1);
    return out;
  }

  LinBanditParams lp;
  lp.lambda = cfg.lambda;
  lp.R = cfg.R;
  lp.B = cfg.B;
  lp.delta = cfg.delta;
  lp.eps = eps;
  LinBanditState state(static_cast<int>(features.cols()), lp);
  out.setup_seconds = seconds_since(t0);

  auto t1 = Clock::now();
  for (long t = 0; t < cfg.T; ++t) {
    int arm;
    if (cfg.algorithm == Algorithm::UCB) {
      arm = state.ucb_select(features, cfg.exec);
    } else {  // TS
      arm = state.ts_select(features, rng, cfg.exec);
    }
    double y = problem.pull(arm, rng);
    state.update(features.row(arm).transpose(), y);
    record(arm, y);
  }
  out.loop_seconds = seconds_since(t1);
  return out;
}

RunResult apg_exp3_run(ApgConfig cfg, const Kernel& kernel,
                       const Eigen::Ref<const Eigen::MatrixXd>& arms,
                       const AdversarialSeq& seq, std::uint64_t seed) {
  const int n_arms = static_cast<int>(arms.rows());
  if (seq.horizon < cfg.T) cfg.T = seq.horizon;

  RunResult out;
  auto t0 = Clock::now();

  NewtonBasis basis = build_basis(kernel, arms, cfg.admissible_error(),
                                  cfg.max_basis_points, cfg.exec);
  out.basis_size = static_cast<int>(basis.points.rows());
  out.basis_truncated = basis.truncated;

  Eigen::MatrixXd features = reduce_rank(basis.features_of(arms, cfg.exec));
  Design design = g_optimal_design(features, cfg.design_tol, 20000, cfg.exec);

  double eta = cfg.eta > 0.0
                   ? cfg.eta
                   : std::sqrt(std::log(static_cast<double>(n_arms)) /
                               (static_cast<double>(features.cols()) *
                                static_cast<double>(cfg.T)));
  Exp3 exp3(features, design, eta, cfg.B, cfg.exec);
  out.setup_seconds = seconds_since(t0);

  const int best_fixed = seq.best_fixed_arm();
  std::mt19937_64 rng(seed);
  out.arms.reserve(cfg.T);
  out.inst_regret.reserve(cfg.T);

  auto t1 = Clock::now();
  for (long t = 0; t < cfg.T; ++t) {
    int arm = exp3.select(rng);
    double y = seq.reward(t, arm);
    exp3.observe(arm, y);
    out.arms.push_back(arm);
    out.inst_regret.push_back(seq.reward(t, best_fixed) - y);
  }
  out.loop_seconds = seconds_since(t1);
  return out;
}

RunResult igp_ucb_run(const Kernel& kernel,
                      const Eigen::Ref<const Eigen::MatrixXd>& arms,
                      const StochasticProblem& problem, const IgpParams& params,
                      std::uint64_t seed, Exec exec) {
  const int n_arms = static_cast<int>(arms.rows());
  const long T = params.T;
  const double lambda = params.effective_lambda();
  if (problem.true_means.size() != n_arms)
    throw std::invalid_argument("true_means size mismatch");

  RunResult out;
  auto t0 = Clock::now();

  // Kernel values between every arm and every (future) selected point; column
  // t is filled when the round-t point is chosen, so k-vectors against the
  // history are contiguous row segments.
  Eigen::MatrixXd gram = kernel.gram(arms);  // |A| x |A|
  Eigen::MatrixXd karms(n_arms, T);
  // M = (K_t + lambda I)^{-1}, stored in the top-left t x t block.
  Eigen::MatrixXd minv(T, T);
  Eigen::VectorXd y(T);
  const double best = problem.true_means.maxCoeff();
  const double kdiag = kernel.at_distance(0.0);

  std::mt19937_64 rng(seed);
  out.arms.reserve(T);
  out.inst_regret.reserve(T);
  double gamma_hat = 0.0;  // 0.5 * ln det(I + lambda^{-1} K_t)
  out.setup_seconds = seconds_since(t0);

  auto t1 = Clock::now();
  for (long t = 0; t < T; ++t) {
    int arm;
    double var_sel;
    if (t == 0) {
      arm = 0;  // all posteriors identical; lowest index wins
      var_sel = kdiag;
    } else {
      auto M = minv.topLeftCorner(t, t);
      auto Kv = karms.leftCols(t);
      Eigen::VectorXd alpha = M * y.head(t);
      Eigen::VectorXd mu = Kv * alpha;
      Eigen::VectorXd quad = rowwise_quadratic(Kv, M, exec);
      Eigen::VectorXd var =
          (kdiag - quad.array()).cwiseMax(0.0).cwiseMin(kdiag).matrix();
      const double beta =
          params.B +
          params.R * std::sqrt(2.0 * (gamma_hat + 1.0 + std::log(1.0 / params.delta)));
      Eigen::VectorXd ucb = mu.array() + beta * var.array().sqrt();
      arm = static_cast<int>(argmax_lowest(ucb));
      var_sel = var(arm);
    }

    double reward = problem.pull(arm, rng);
    out.arms.push_back(arm);
    out.inst_regret.push_back(best - problem.true_means(arm));
    gamma_hat += 0.5 * std::log1p(var_sel / lambda);

    // Grow (K_t + lambda I)^{-1} by one row/column via the Schur complement.
    y(t) = reward;
    karms.col(t) = gram.col(arm);
    if (t == 0) {
      minv(0, 0) = 1.0 / (kdiag + lambda);
    } else {
      Eigen::VectorXd k = karms.row(arm).head(t).transpose();
      auto M = minv.topLeftCorner(t, t);
      Eigen::VectorXd u = M * k;
      double s = (kdiag + lambda) - k.dot(u);
      s = std::max(s, 1e-12);
      const double sinv = 1.0 / s;
      M.noalias() += sinv * (u * u.transpose());
      minv.col(t).head(t) = -sinv * u;
      minv.row(t).head(t) = minv.col(t).head(t).transpose();
      minv(t, t) = sinv;
    }
  }
  out.loop_seconds = seconds_since(t1);
  return out;
}

RunResult uniform_random_run(const StochasticProblem& problem, long T,
                             std::uint64_t seed) {
  const int n_arms = static_cast<int>(problem.true_means.size());
  const double best = problem.true_means.maxCoeff();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n_arms - 1);
  RunResult out;
  out.arms.reserve(T);
  out.inst_regret.reserve(T);
  auto t1 = Clock::now();
  for (long t = 0; t < T; ++t) {
    int arm = pick(rng);
    problem.pull(arm, rng);
    out.arms.push_back(arm);
    out.inst_regret.push_back(best - problem.true_means(arm));
  }
  out.loop_seconds = seconds_since(t1);
  return out;
}

}  // namespace apgb
