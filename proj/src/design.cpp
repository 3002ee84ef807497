#include "apgb/design.hpp"

#include <cmath>

#include "apgb/linalg_util.hpp"

namespace apgb {

namespace {

Eigen::MatrixXd design_matrix(const Eigen::Ref<const Eigen::MatrixXd>& f,
                              const Eigen::VectorXd& w) {
  return f.transpose() * w.asDiagonal() * f;
}

Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& q) {
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  if (llt.info() != Eigen::Success)
    throw SpanDeficientError("g_optimal_design: design matrix not PD");
  return llt.solve(Eigen::MatrixXd::Identity(q.rows(), q.cols()));
}

// One Frank-Wolfe run from the given starting weights.
void frank_wolfe(const Eigen::Ref<const Eigen::MatrixXd>& features,
                 double tol, int max_iters, Exec exec, Design& design) {
  const Eigen::Index d = features.cols();
  const double target = static_cast<double>(d) * (1.0 + tol);
  Eigen::MatrixXd q = design_matrix(features, design.weights);
  Eigen::MatrixXd qinv = invert_spd(q);

  for (int iter = 0; iter < max_iters; ++iter) {
    if (iter > 0 && iter % 256 == 0) qinv = invert_spd(q);  // drift guard
    const Eigen::VectorXd lev = rowwise_quadratic(features, qinv, exec);
    const Eigen::Index star = argmax_lowest(lev);
    const double g = lev[star];
    design.leverage_max = g;
    if (g <= target) {
      design.converged = true;
      return;
    }
    const double gamma = (g / static_cast<double>(d) - 1.0) / (g - 1.0);
    const Eigen::VectorXd x = features.row(star);
    // Q <- (1-gamma) Q + gamma x x^T, inverse via Sherman-Morrison.
    const double c = gamma / (1.0 - gamma);
    const Eigen::VectorXd v = qinv * x;
    qinv.noalias() -= (c / (1.0 + c * x.dot(v))) * (v * v.transpose());
    qinv /= (1.0 - gamma);
    q = (1.0 - gamma) * q + gamma * (x * x.transpose());
    design.weights *= (1.0 - gamma);
    design.weights[star] += gamma;
  }
  // Not converged within max_iters; report the last leverage seen.
  const Eigen::VectorXd lev = rowwise_quadratic(features, invert_spd(q), exec);
  design.leverage_max = lev.maxCoeff();
  design.converged = design.leverage_max <= target;
}

}  // namespace

Design g_optimal_design(const Eigen::Ref<const Eigen::MatrixXd>& features,
                        double tol, int max_iters, Exec exec) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n == 0) throw std::invalid_argument("g_optimal_design: no arms");

  // Pivoted QR of features^T picks D linearly independent arms; starting
  // Frank-Wolfe from the uniform design on that spanning set (instead of on
  // all arms) keeps the support small, since Frank-Wolfe only ever adds the
  // current worst-leverage arm.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(features.transpose());
  if (qr.rank() < d)
    throw SpanDeficientError("g_optimal_design: arm features do not span R^D");

  Design design;
  design.weights = Eigen::VectorXd::Zero(n);
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = 0; k < d; ++k)
    design.weights[perm[k]] = 1.0 / static_cast<double>(d);

  // Frank-Wolfe shrinks existing weights multiplicatively but never zeroes
  // them; alternate optimization with pruning of negligible weights. Each
  // pass restarts Frank-Wolfe from the pruned design (which may re-add any
  // arm), and the loop ends on a pass that converged without further
  // pruning, so the leverage guarantee always holds for the returned
  // weights.
  for (int pass = 0; pass < 10; ++pass) {
    design.converged = false;
    frank_wolfe(features, tol, max_iters, exec, design);
    const double floor = 1e-3 * design.weights.maxCoeff();
    double pruned = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (design.weights[i] > 0.0 && design.weights[i] < floor) {
        pruned += design.weights[i];
        design.weights[i] = 0.0;
      }
    }
    if (pruned == 0.0) break;
    design.weights /= (1.0 - pruned);
  }
  return design;
}

}  // namespace apgb
