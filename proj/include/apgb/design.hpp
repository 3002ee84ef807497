#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "apgb/newton_basis.hpp"  // Exec

namespace apgb {

/// Arm features do not span R^D; callers must reduce the dimension first.
struct SpanDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// G-optimal (near-optimal) design over a finite arm set: a distribution pi
/// with max_x x^T Q(pi)^{-1} x <= D (1 + tol), Q(pi) = sum pi(x) x x^T.
struct Design {
  Eigen::VectorXd weights;
  double leverage_max = 0.0;
  bool converged = false;
};

/// Frank-Wolfe ascent on log det Q(pi) starting from the uniform design:
/// pick the arm of maximum leverage g, step gamma = (g/D - 1)/(g - 1).
/// Throws SpanDeficientError when rank(features) < D.
Design g_optimal_design(const Eigen::Ref<const Eigen::MatrixXd>& features,
                        double tol = 0.01, int max_iters = 20000,
                        Exec exec = Exec::Parallel);

}  // namespace apgb
