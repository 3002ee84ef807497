#pragma once

#include <Eigen/Dense>

#include "apgb/newton_basis.hpp"  // Exec

namespace apgb {

/// Lowest index wins ties.
inline Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

/// out[i] = rows.row(i) * m * rows.row(i)^T. Processed in fixed-size row
/// chunks so the result is bit-identical at any thread count.
Eigen::VectorXd rowwise_quadratic(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const Eigen::Ref<const Eigen::MatrixXd>& m,
                                  Exec exec = Exec::Parallel);

}  // namespace apgb
