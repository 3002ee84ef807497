#pragma once

#include <Eigen/Dense>
#include <random>

#include "apgb/design.hpp"

namespace apgb {

/// EXP3 for the adversarial misspecified linear bandit over a finite arm set.
/// Round t: q_t(x) ~ exp(eta * sum_{s<t} <phi_s, x>), p_t = gamma pi_exp +
/// (1 - gamma) q_t, sample x_t ~ p_t; on reward g, the estimator is
/// phi_t = g * Q(p_t)^{-1} x_t. The mixing weight is tied to the exploration
/// distribution: gamma = B * Gamma(pi_exp) * eta.
class Exp3 {
 public:
  /// pi_exp should come from g_optimal_design over the same features.
  Exp3(const Eigen::MatrixXd& features, const Design& exploration, double eta,
       double B, Exec exec = Exec::Parallel);

  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  double leverage() const { return leverage_; }
  const Eigen::VectorXd& cumulative_phi() const { return cum_phi_; }
  const Eigen::VectorXd& last_p() const { return p_; }
  const Eigen::VectorXd& last_q() const { return q_; }

  /// Computes q_t and p_t and samples an arm. Must be followed by observe().
  int select(std::mt19937_64& rng);

  /// Folds the revealed reward of the selected arm into cumulative_phi.
  void observe(int arm, double reward);

  /// Theorem-recommended default eta = sqrt(log|A| / (D * T)).
  static double default_eta(Eigen::Index n_arms, Eigen::Index dim, long horizon);

 private:
  void compute_distributions();

  Eigen::MatrixXd features_;
  Eigen::VectorXd pi_exp_;
  double eta_;
  double gamma_;
  double leverage_;
  Exec exec_;
  Eigen::VectorXd cum_phi_;
  Eigen::VectorXd q_;
  Eigen::VectorXd p_;
  bool pending_ = false;
};

}  // namespace apgb
