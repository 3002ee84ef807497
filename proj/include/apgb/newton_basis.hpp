#pragma once

#include <Eigen/Dense>
#include <vector>

#include "apgb/kernel.hpp"

namespace apgb {

/// Execution policy for the data-parallel inner loops. The parallel variants
/// partition work into fixed-size chunks so results are bit-identical to the
/// serial reference at any thread count.
enum class Exec { Serial, Parallel };

/// Newton basis of V({xi_1, ..., xi_D}) built by P-greedy selection over a
/// finite candidate set. transfer is lower-triangular with
///   N_k(x) = sum_{j <= k} transfer(k, j) * K(x, xi_j),
/// so features can be evaluated at arbitrary points, not just candidates.
struct NewtonBasis {
  Kernel kernel;
  Eigen::MatrixXd points;           // D x d, in selection order
  Eigen::MatrixXd transfer;         // D x D lower-triangular
  std::vector<double> residual_trace;  // max_x P_m^2(x) after m = 1..D
  double admissible_error = 0.0;
  bool truncated = false;
  bool precision_exhausted = false;

  int size() const { return static_cast<int>(points.rows()); }

  /// x_tilde = [N_1(x), ..., N_D(x)]^T.
  Eigen::VectorXd feature_of(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// P(x) = sqrt(max(0, K(x,x) - ||x_tilde||^2)).
  double power_function(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Features of every row of `points_in`, one row per point.
  Eigen::MatrixXd features_of(const Eigen::Ref<const Eigen::MatrixXd>& points_in,
                              Exec exec = Exec::Parallel) const;

  /// Gram matrix <N_i, N_j>_H over the selected points; identity up to roundoff.
  Eigen::MatrixXd basis_gram() const;
};

/// Algorithm: start from xi_1 = argmax K(x, x), then repeatedly select the
/// candidate maximizing the current squared power function, updating each
/// candidate's P^2 incrementally (O(|candidates|) per iteration). Stops when
/// max P^2 < e^2, or max_points is reached (truncated flag), or the pivot
/// P^2 falls below the 1e-14 numeric floor (precision_exhausted flag).
/// Ties in the argmax break toward the lowest candidate index.
NewtonBasis build_basis(const Kernel& kernel,
                        const Eigen::Ref<const Eigen::MatrixXd>& candidates,
                        double admissible_error, int max_points = -1,
                        Exec exec = Exec::Parallel);

struct DecayReport {
  double exp_slope = 0.0;   // log(P_m^2) ~ exp_slope * m^{1/d}
  double exp_r2 = 0.0;
  double poly_slope = 0.0;  // log(P_m^2) ~ poly_slope * log(m)
  double poly_r2 = 0.0;
  bool degenerate = false;
};

/// Least-squares fits of the residual trace in the exponential regime
/// (against m^{1/d}) and the polynomial regime (against log m).
DecayReport decay_diagnostics(const NewtonBasis& basis);

}  // namespace apgb
