#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "apgb/kernel.hpp"

namespace apgb {

/// {i/m : i = 0..m-1}^d.
Eigen::MatrixXd cube_grid(int d, int m);

/// The benchmark grids: m = 1000 (d=1), 30 (d=2), 10 (d=3).
Eigen::MatrixXd benchmark_grid(int d);

enum class L1Mode { Mean, Sum };

/// A random unit-norm RKHS reward function over a finite arm set. Center
/// points are sampled from the arm set without replacement until 300 centers
/// are reached or the power function over the arms falls below 1e-4; the
/// coefficient vector is uniform on the unit sphere over the Gram-Schmidt
/// orthonormalization (in sampling order) of the center translates, so
/// ||f||_H = 1 by construction. Observation noise is Gaussian with standard
/// deviation 0.2 * ||f||_{L1(A)}.
struct SyntheticEnv {
  Kernel kernel;
  Eigen::MatrixXd arms;      // |A| x d
  Eigen::MatrixXd centers;   // m x d, in sampling order
  Eigen::MatrixXd transfer;  // m x m lower-triangular: phi_i over translates
  Eigen::VectorXd coeffs;    // unit norm
  Eigen::VectorXd f;         // f evaluated at every arm
  double f_star = 0.0;
  int best_arm = 0;
  double l1_norm = 0.0;
  double noise_sigma = 0.0;
  double B = 1.0;
  std::uint64_t seed = 0;

  int n_arms() const { return static_cast<int>(arms.rows()); }

  /// Coefficients over kernel translates K(., center_j); used by oracle checks.
  Eigen::VectorXd translate_coeffs() const {
    return transfer.transpose() * coeffs;
  }

  /// f at an arbitrary point via the kernel expansion.
  double f_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  double pull(int arm, std::mt19937_64& noise_rng) const {
    std::normal_distribution<double> gauss(0.0, noise_sigma);
    return f[arm] + (noise_sigma > 0.0 ? gauss(noise_rng) : 0.0);
  }

  std::string serialize() const;
  static SyntheticEnv deserialize(const std::string& text);
};

struct EnvOptions {
  L1Mode l1_mode = L1Mode::Mean;
  int max_centers = 300;
  double power_stop = 1e-4;
  double noise_override = -1.0;  // >= 0 replaces the derived noise_sigma
};

SyntheticEnv generate_env(const Kernel& kernel,
                          const Eigen::Ref<const Eigen::MatrixXd>& arms,
                          std::uint64_t seed, EnvOptions options = {});

/// Oblivious adversarial sequence: independent unit-norm reward functions,
/// each held for drift_period rounds.
struct AdversarialSeq {
  std::vector<SyntheticEnv> segments;
  long drift_period = 1;
  long horizon = 0;

  const SyntheticEnv& segment_at(long round) const {
    return segments[static_cast<size_t>(round / drift_period)];
  }
  double reward(long round, int arm) const { return segment_at(round).f[arm]; }

  /// argmax over arms of sum_t f_t(arm).
  int best_fixed_arm() const;
  Eigen::VectorXd total_reward_per_arm() const;
};

AdversarialSeq generate_adversarial(const Kernel& kernel,
                                    const Eigen::Ref<const Eigen::MatrixXd>& arms,
                                    long horizon, long drift_period,
                                    std::uint64_t seed, EnvOptions options = {});

}  // namespace apgb
