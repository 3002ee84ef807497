#pragma once

#include <Eigen/Dense>
#include <random>

namespace apgb {

/// Tracks A_t = lambda*I + sum_s x_s x_s^T through rank-1 updates, maintaining
/// the inverse (Sherman-Morrison, O(D^2) per update) and log det(lambda^{-1} A_t).
/// An exact re-factorization every `kRefactorPeriod` updates bounds drift.
class SpdTracker {
 public:
  static constexpr long kRefactorPeriod = 512;

  SpdTracker(int dim, double lambda);

  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  long rounds() const { return t_; }
  double logdet() const { return logdet_; }
  const Eigen::MatrixXd& inverse() const { return inv_; }
  const Eigen::MatrixXd& matrix() const { return a_; }

  /// A <- A + x x^T; logdet += log(1 + x^T A^{-1} x).
  void rank1_update(const Eigen::Ref<const Eigen::VectorXd>& x);

  /// sqrt(x^T A^{-1} x).
  double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return std::sqrt(std::max(0.0, x.dot(inv_ * x)));
  }

  /// Draw from N(mean, scale^2 * A^{-1}) via a lower-triangular factor of the
  /// maintained inverse; the factor is cached until the next update.
  Eigen::VectorXd sample_gaussian(const Eigen::Ref<const Eigen::VectorXd>& mean,
                                  double scale, std::mt19937_64& rng) const;

  /// Recompute inverse and logdet from A by dense factorization.
  void refactor();

 private:
  int dim_;
  double lambda_;
  long t_ = 0;
  long since_refactor_ = 0;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd inv_;
  double logdet_ = 0.0;
  mutable Eigen::MatrixXd inv_chol_;  // lower, inv_chol_ * inv_chol_^T = inv_
  mutable bool inv_chol_valid_ = false;
};

}  // namespace apgb
