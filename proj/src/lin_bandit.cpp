#include "apgb/lin_bandit.hpp"

#include <cmath>
#include <stdexcept>

#include "apgb/linalg_util.hpp"

namespace apgb {

LinBanditState::LinBanditState(int dim, LinBanditParams params)
    : params_(params),
      tracker_(dim, params.lambda),
      b_(Eigen::VectorXd::Zero(dim)),
      theta_hat_(Eigen::VectorXd::Zero(dim)) {
  if (params.lambda < 1.0)
    throw std::invalid_argument("LinBanditState: lambda >= 1 required");
  if (params.delta <= 0.0 || params.delta > 1.0)
    throw std::invalid_argument("LinBanditState: delta in (0, 1] required");
}

double LinBanditState::beta_with_delta(double delta) const {
  const double radicand = tracker_.logdet() + 2.0 * std::log(1.0 / delta);
  return params_.R * std::sqrt(std::max(0.0, radicand)) +
         std::sqrt(params_.lambda) * params_.B;
}

Eigen::VectorXd LinBanditState::ucb_scores(
    const Eigen::Ref<const Eigen::MatrixXd>& features, Exec exec) const {
  const double width = beta() + params_.eps * psi_;
  const Eigen::VectorXd quad =
      rowwise_quadratic(features, tracker_.inverse(), exec);
  return (features * theta_hat_).array() +
         width * quad.array().max(0.0).sqrt();
}

int LinBanditState::ucb_select(
    const Eigen::Ref<const Eigen::MatrixXd>& features, Exec exec) const {
  return static_cast<int>(argmax_lowest(ucb_scores(features, exec)));
}

int LinBanditState::ts_select(const Eigen::Ref<const Eigen::MatrixXd>& features,
                              std::mt19937_64& rng, Exec exec) const {
  const double scale = beta_with_delta(params_.delta / 2.0) + params_.eps * psi_;
  const Eigen::VectorXd mu = tracker_.sample_gaussian(theta_hat_, scale, rng);
  (void)exec;
  return static_cast<int>(argmax_lowest(features * mu));
}

void LinBanditState::update(const Eigen::Ref<const Eigen::VectorXd>& x,
                            double y) {
  psi_ += tracker_.mahalanobis(x);
  tracker_.rank1_update(x);
  b_.noalias() += y * x;
  theta_hat_.noalias() = tracker_.inverse() * b_;
}

}  // namespace apgb
