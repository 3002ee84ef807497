#include "apgb/spd_tracker.hpp"

#include <cmath>
#include <stdexcept>

namespace apgb {

SpdTracker::SpdTracker(int dim, double lambda)
    : dim_(dim),
      lambda_(lambda),
      a_(Eigen::MatrixXd::Identity(dim, dim) * lambda),
      inv_(Eigen::MatrixXd::Identity(dim, dim) / lambda) {
  if (dim <= 0) throw std::invalid_argument("SpdTracker: dim must be positive");
  if (lambda <= 0.0)
    throw std::invalid_argument("SpdTracker: lambda must be positive");
}

void SpdTracker::rank1_update(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd v = inv_ * x;
  const double m2 = x.dot(v);  // >= 0 since inv_ is PD
  inv_.noalias() -= v * v.transpose() / (1.0 + m2);
  a_.noalias() += x * x.transpose();
  logdet_ += std::log1p(m2);
  ++t_;
  inv_chol_valid_ = false;
  if (++since_refactor_ >= kRefactorPeriod) refactor();
}

void SpdTracker::refactor() {
  Eigen::LLT<Eigen::MatrixXd> llt(a_);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("SpdTracker: refactorization failed (A not PD)");
  inv_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
  logdet_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum() -
            dim_ * std::log(lambda_);
  since_refactor_ = 0;
  inv_chol_valid_ = false;
}

Eigen::VectorXd SpdTracker::sample_gaussian(
    const Eigen::Ref<const Eigen::VectorXd>& mean, double scale,
    std::mt19937_64& rng) const {
  if (!inv_chol_valid_) {
    Eigen::LLT<Eigen::MatrixXd> llt(inv_);
    if (llt.info() != Eigen::Success) {
      const_cast<SpdTracker*>(this)->refactor();
      llt.compute(inv_);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "SpdTracker: covariance factorization failed after refactor");
    }
    inv_chol_ = llt.matrixL();
    inv_chol_valid_ = true;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(dim_);
  for (int i = 0; i < dim_; ++i) z[i] = gauss(rng);
  return mean + scale * (inv_chol_ * z);
}

}  // namespace apgb
