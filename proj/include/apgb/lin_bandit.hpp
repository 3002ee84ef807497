#pragma once

#include <Eigen/Dense>
#include <random>

#include "apgb/spd_tracker.hpp"
#include "apgb/newton_basis.hpp"  // Exec

namespace apgb {

struct LinBanditParams {
  double lambda = 1.0;
  double R = 1.0;      // sub-Gaussian noise scale
  double B = 1.0;      // norm bound on theta
  double delta = 1e-3;
  double eps = 0.0;    // uniform misspecification bound
};

/// State of the modified LinUCB / Thompson Sampling algorithms for the
/// misspecified linear bandit: regularized design matrix (via SpdTracker),
/// reward-weighted sum b_t, ridge estimate theta_hat, and the accumulator
/// psi_t = sum_s ||x_s||_{A_{s-1}^{-1}} that inflates the confidence width
/// by eps * psi_t.
class LinBanditState {
 public:
  LinBanditState(int dim, LinBanditParams params);

  const LinBanditParams& params() const { return params_; }
  const SpdTracker& tracker() const { return tracker_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& theta_hat() const { return theta_hat_; }
  double psi() const { return psi_; }
  long rounds() const { return tracker_.rounds(); }

  /// beta_t = R * sqrt(log det(lambda^{-1} A_t) + 2 log(1/delta)) + sqrt(lambda) * B.
  double beta() const { return beta_with_delta(params_.delta); }
  double beta_with_delta(double delta) const;

  /// Modified UCB scores <theta_hat, x> + ||x||_{A^{-1}} (beta + eps * psi)
  /// for every row of `features`.
  Eigen::VectorXd ucb_scores(const Eigen::Ref<const Eigen::MatrixXd>& features,
                             Exec exec = Exec::Parallel) const;

  /// argmax of ucb_scores; ties break to the lowest arm index.
  int ucb_select(const Eigen::Ref<const Eigen::MatrixXd>& features,
                 Exec exec = Exec::Parallel) const;

  /// Sample mu ~ N(theta_hat, (beta(delta/2) + eps psi)^2 A^{-1}) and return
  /// argmax <mu, x>.
  int ts_select(const Eigen::Ref<const Eigen::MatrixXd>& features,
                std::mt19937_64& rng, Exec exec = Exec::Parallel) const;

  /// psi += ||x||_{A_{t-1}^{-1}} (before the rank-1 update), then A += x x^T,
  /// b += y x, theta_hat recomputed.
  void update(const Eigen::Ref<const Eigen::VectorXd>& x, double y);

 private:
  LinBanditParams params_;
  SpdTracker tracker_;
  Eigen::VectorXd b_;
  Eigen::VectorXd theta_hat_;
  double psi_ = 0.0;
};

}  // namespace apgb
