#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "apgb/environment.hpp"
#include "apgb/kernel.hpp"
#include "apgb/newton_basis.hpp"

namespace apgb {

enum class Algorithm { UCB, PE, TS, EXP3 };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

/// Parameters for the approximate RKHS bandit algorithms. The admissible
/// error of the basis is e = alpha / T^q and the misspecification bound fed
/// to the linear layer is eps = B * e.
struct ApgConfig {
  Algorithm algorithm = Algorithm::UCB;
  long T = 5000;
  double q = 0.5;
  double alpha = 5e-3;
  double lambda = 1.0;
  double R = 0.1;
  double B = 1.0;
  double delta = 1e-3;
  double eta = 0.0;  // EXP3 learning rate; 0 selects sqrt(log|A| / (D T))
  double design_tol = 0.01;
  int max_basis_points = 2000;
  Exec exec = Exec::Parallel;

  double admissible_error() const {
    return alpha / std::pow(static_cast<double>(T), q);
  }
};

/// A stochastic bandit instance as seen by an algorithm: a pull oracle plus
/// the true means, which only the regret accounting reads.
struct StochasticProblem {
  std::function<double(int, std::mt19937_64&)> pull;
  Eigen::VectorXd true_means;

  static StochasticProblem from_env(const SyntheticEnv& env) {
    return {[&env](int arm, std::mt19937_64& rng) { return env.pull(arm, rng); },
            env.f};
  }
};

struct RunResult {
  std::vector<int> arms;
  std::vector<double> inst_regret;
  double setup_seconds = 0.0;  // basis + features + design, excluded from loop
  double loop_seconds = 0.0;
  int basis_size = 0;
  bool basis_truncated = false;

  double total_seconds() const { return setup_seconds + loop_seconds; }
  std::vector<double> cumulative_regret() const;
};

/// APG-{UCB, TS, PE}: build the Newton basis over the arm set with
/// e = alpha/T^q, map arms to features, run the configured misspecified
/// linear bandit algorithm with eps = B * e.
RunResult apg_run(const ApgConfig& cfg, const Kernel& kernel,
                  const Eigen::Ref<const Eigen::MatrixXd>& arms,
                  const StochasticProblem& problem, std::uint64_t seed);

/// APG-EXP3 on an oblivious adversarial sequence; rewards are observed
/// noiselessly and regret is measured against the best fixed arm in
/// hindsight.
RunResult apg_exp3_run(ApgConfig cfg, const Kernel& kernel,
                       const Eigen::Ref<const Eigen::MatrixXd>& arms,
                       const AdversarialSeq& seq, std::uint64_t seed);

struct IgpParams {
  long T = 5000;
  double B = 1.0;
  double R = 0.1;
  double delta = 1e-3;
  // lambda defaults to 1 + 2/T when <= 0.
  double lambda = 0.0;

  double effective_lambda() const {
    return lambda > 0.0 ? lambda : 1.0 + 2.0 / static_cast<double>(T);
  }
};

/// Exact IGP-UCB baseline. Per round, the GP posterior mean and variance are
/// computed for every arm from the maintained (K_t + lambda I)^{-1}, which is
/// grown by Schur-complement block updates; the information-gain surrogate
/// 0.5 * ln det(I + lambda^{-1} K_t) is accumulated incrementally from the
/// posterior variance of the selected arm.
RunResult igp_ucb_run(const Kernel& kernel,
                      const Eigen::Ref<const Eigen::MatrixXd>& arms,
                      const StochasticProblem& problem, const IgpParams& params,
                      std::uint64_t seed, Exec exec = Exec::Parallel);

/// Uniform-random play, used for regret normalization checks.
RunResult uniform_random_run(const StochasticProblem& problem, long T,
                             std::uint64_t seed);

}  // namespace apgb
