#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "apgb/design.hpp"

namespace apgb {

/// Phased elimination with G-optimal exploration for the stochastic
/// (misspecified) linear bandit over a fixed finite arm set.
///
/// Phase l uses accuracy eps_l = 2^{-l}: a G-optimal design is computed on
/// the active arms, arm a is pulled ceil(pi_l(a) * g_l) times (at least once
/// on each design-support arm) with
/// g_l = (2 D noise_scale^2 / eps_l^2) * log(|A| l (l + 1) / delta), a
/// phase-local ridge estimate (lambda_pe = 1e-8) is formed from this phase's
/// data only, and every arm a with max_b <theta_l, x_b - x_a> > 2 eps_l is
/// eliminated. noise_scale is the subgaussian scale of the observation
/// noise; noise_scale = 1 recovers the classic unit-subgaussian schedule,
/// and smaller noise proportionally shortens the phases.
class PhasedElimination {
 public:
  struct Params {
    double delta = 0.05;
    double noise_scale = 1.0;
    double lambda_pe = 1e-8;
    double design_tol = 0.01;
    int design_max_iters = 20000;
  };

  struct PhaseRecord {
    int phase = 0;
    int active_before = 0;
    int active_after = 0;
    long pulls = 0;
  };

  PhasedElimination(const Eigen::MatrixXd& features, Params params,
                    Exec exec = Exec::Parallel);

  const std::vector<int>& active_arms() const { return active_; }
  const std::vector<PhaseRecord>& phases() const { return records_; }

  /// Plays `horizon` rounds. pull(arm) returns the observed reward;
  /// on_round(round_index, arm) is invoked once per round for bookkeeping.
  void run(long horizon, const std::function<double(int)>& pull,
           const std::function<void(long, int)>& on_round = nullptr);

 private:
  Eigen::MatrixXd features_;
  Params params_;
  Exec exec_;
  std::vector<int> active_;
  std::vector<PhaseRecord> records_;
};

}  // namespace apgb
