#include "apgb/exp3.hpp"

#include <cmath>
#include <stdexcept>

#include "apgb/linalg_util.hpp"

namespace apgb {

Exp3::Exp3(const Eigen::MatrixXd& features, const Design& exploration,
           double eta, double B, Exec exec)
    : features_(features),
      pi_exp_(exploration.weights),
      eta_(eta),
      leverage_(exploration.leverage_max),
      exec_(exec),
      cum_phi_(Eigen::VectorXd::Zero(features.cols())) {
  if (eta <= 0.0) throw std::invalid_argument("Exp3: eta must be positive");
  gamma_ = B * leverage_ * eta;
  if (gamma_ <= 0.0 || gamma_ >= 1.0)
    throw std::invalid_argument(
        "Exp3: gamma = B * Gamma(pi_exp) * eta outside (0, 1); lower eta");
}

double Exp3::default_eta(Eigen::Index n_arms, Eigen::Index dim, long horizon) {
  return std::sqrt(std::log(static_cast<double>(n_arms)) /
                   (static_cast<double>(dim) * static_cast<double>(horizon)));
}

void Exp3::compute_distributions() {
  // Max-shifted softmax; eta * cumulative scores can grow linearly with t.
  Eigen::VectorXd logits = eta_ * (features_ * cum_phi_);
  logits.array() -= logits.maxCoeff();
  q_ = logits.array().exp();
  q_ /= q_.sum();
  p_ = gamma_ * pi_exp_ + (1.0 - gamma_) * q_;
}

int Exp3::select(std::mt19937_64& rng) {
  if (pending_)
    throw std::logic_error("Exp3: select() called before observe()");
  compute_distributions();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  int arm = static_cast<int>(p_.size()) - 1;
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    acc += p_[i];
    if (u < acc) {
      arm = static_cast<int>(i);
      break;
    }
  }
  pending_ = true;
  return arm;
}

void Exp3::observe(int arm, double reward) {
  if (!pending_) throw std::logic_error("Exp3: observe() without select()");
  const Eigen::MatrixXd qmat =
      features_.transpose() * p_.asDiagonal() * features_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(qmat);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("Exp3: Q_t singular despite gamma > 0");
  cum_phi_.noalias() +=
      reward * ldlt.solve(features_.row(arm).transpose());
  pending_ = false;
}

}  // namespace apgb
