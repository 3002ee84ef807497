#include "apgb/phased_elim.hpp"

#include <cmath>

namespace apgb {

PhasedElimination::PhasedElimination(const Eigen::MatrixXd& features,
                                     Params params, Exec exec)
    : features_(features), params_(params), exec_(exec) {
  active_.resize(features.rows());
  for (size_t i = 0; i < active_.size(); ++i) active_[i] = static_cast<int>(i);
}

void PhasedElimination::run(long horizon,
                            const std::function<double(int)>& pull,
                            const std::function<void(long, int)>& on_round) {
  const double n_arms = static_cast<double>(features_.rows());
  long round = 0;
  int phase = 1;
  while (round < horizon) {
    if (active_.size() == 1) {
      // Degenerate active set: commit to the survivor.
      while (round < horizon) {
        const int arm = active_.front();
        pull(arm);
        if (on_round) on_round(round, arm);
        ++round;
      }
      break;
    }

    const Eigen::Index na = static_cast<Eigen::Index>(active_.size());
    Eigen::MatrixXd fa(na, features_.cols());
    for (Eigen::Index i = 0; i < na; ++i)
      fa.row(i) = features_.row(active_[i]);

    // Active arms need not span R^D once elimination has shrunk the set;
    // rotate onto the top singular subspace (an isometry on active features).
    // The floor must keep the rotated features well-conditioned: the design
    // matrix squares their condition number, so directions below ~1e-5 of
    // the top singular value would make its Cholesky factorization fail.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fa, Eigen::ComputeThinV);
    const double sv_floor = 1e-5 * svd.singularValues()[0];
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > sv_floor) ++rank;
    const Eigen::MatrixXd fr =
        rank < fa.cols() ? Eigen::MatrixXd(fa * svd.matrixV().leftCols(rank))
                         : fa;
    const Eigen::Index dim = fr.cols();

    const Design design =
        g_optimal_design(fr, params_.design_tol, params_.design_max_iters, exec_);

    const double eps_l = std::pow(2.0, -phase);
    const double g_l =
        (2.0 * static_cast<double>(dim) * params_.noise_scale *
         params_.noise_scale / (eps_l * eps_l)) *
        std::log(n_arms * phase * (phase + 1) / params_.delta);

    PhaseRecord record;
    record.phase = phase;
    record.active_before = static_cast<int>(na);

    Eigen::MatrixXd v = params_.lambda_pe *
                        Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    bool complete = true;
    for (Eigen::Index i = 0; i < na && complete; ++i) {
      // Every design-support arm gets at least one pull so the phase-local
      // estimate is well-posed even when g_l is tiny (low or zero noise).
      const long n_pulls =
          design.weights[i] <= 0.0
              ? 0
              : std::max<long>(
                    1, static_cast<long>(std::ceil(design.weights[i] * g_l)));
      for (long k = 0; k < n_pulls; ++k) {
        if (round >= horizon) {
          complete = false;
          break;
        }
        const int arm = active_[i];
        const double y = pull(arm);
        if (on_round) on_round(round, arm);
        ++round;
        ++record.pulls;
        v.noalias() += fr.row(i).transpose() * fr.row(i);
        b.noalias() += y * fr.row(i).transpose();
      }
    }

    if (complete) {
      const Eigen::VectorXd theta = v.ldlt().solve(b);
      const Eigen::VectorXd means = fr * theta;
      const double best = means.maxCoeff();
      std::vector<int> survivors;
      for (Eigen::Index i = 0; i < na; ++i)
        if (best - means[i] <= 2.0 * eps_l)
          survivors.push_back(active_[i]);
      active_ = std::move(survivors);
    }
    record.active_after = static_cast<int>(active_.size());
    records_.push_back(record);
    ++phase;
  }
}

}  // namespace apgb
