#include "apgb/newton_basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace apgb {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatrixLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Lowest index wins ties.
Eigen::Index argmax_strict(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

NewtonBasis build_basis(const Kernel& kernel,
                        const Eigen::Ref<const Eigen::MatrixXd>& candidates,
                        double admissible_error, int max_points, Exec exec) {
  const Eigen::Index n = candidates.rows();
  if (n == 0) throw std::invalid_argument("build_basis: empty candidate set");
  if (admissible_error <= 0.0)
    throw std::invalid_argument("build_basis: admissible error must be > 0");
  if (candidates.cols() != kernel.dim())
    throw std::invalid_argument("build_basis: candidate dimension mismatch");
  const int cap =
      max_points > 0 ? std::min<Eigen::Index>(max_points, n)
                     : std::min<Eigen::Index>(n, 2000);
  const double e2 = admissible_error * admissible_error;
  const bool parallel = exec == Exec::Parallel;

  // P_0^2(x) = K(x, x).
  Eigen::VectorXd p2(n);
  for (Eigen::Index i = 0; i < n; ++i) p2[i] = kernel.at_distance(0.0);

  RowMajorMatrix values(n, cap);  // N_k(x_i) for every candidate
  Eigen::MatrixXd transfer = Eigen::MatrixXd::Zero(cap, cap);
  std::vector<Eigen::Index> selected;
  std::vector<double> trace;
  bool exhausted = false;

  for (int m = 0; m < cap; ++m) {
    const Eigen::Index pivot = argmax_strict(p2);
    const double pivot_p2 = p2[pivot];
    if (m > 0 && pivot_p2 < 1e-14) {
      exhausted = true;
      break;
    }
    const double inv_sq = 1.0 / std::sqrt(pivot_p2);
    const Eigen::VectorXd pivot_vals = values.row(pivot).head(m);
    const Eigen::VectorXd pivot_point = candidates.row(pivot);

#pragma omp parallel for schedule(static) if (parallel)
    for (Eigen::Index i = 0; i < n; ++i) {
      double u = kernel.at_distance((candidates.row(i) - pivot_point.transpose()).norm());
      if (m > 0) u -= values.row(i).head(m).dot(pivot_vals);
      const double nv = u * inv_sq;
      values(i, m) = nv;
      p2[i] = std::max(0.0, p2[i] - nv * nv);
    }

    // N_{m+1} = (K(., xi) - sum_k N_k(xi) N_k) / sqrt(P_m^2(xi)) expressed in
    // kernel-translate coefficients.
    transfer(m, m) = inv_sq;
    for (int k = 0; k < m; ++k)
      transfer.row(m).head(m).noalias() -=
          pivot_vals[k] * inv_sq * transfer.row(k).head(m);
    selected.push_back(pivot);
    trace.push_back(p2.maxCoeff());
    if (trace.back() < e2) break;
  }

  const int D = static_cast<int>(selected.size());
  NewtonBasis basis{kernel,
                    Eigen::MatrixXd(D, candidates.cols()),
                    transfer.topLeftCorner(D, D),
                    std::move(trace),
                    admissible_error,
                    /*truncated=*/false,
                    exhausted};
  for (int m = 0; m < D; ++m) basis.points.row(m) = candidates.row(selected[m]);
  basis.truncated = !exhausted && !basis.residual_trace.empty() &&
                    basis.residual_trace.back() >= e2;

  // The incremental Gram-Schmidt drifts by ~1e-6 on the largest bases, and
  // the transfer entries grow like 1/sqrt(pivot power), so a correction in
  // double precision cannot do better (the Gram evaluation itself cancels at
  // that level). One Cholesky correction carried out in extended precision
  // restores orthonormality to ~1e-9 while preserving the selected span and
  // triangular structure.
  if (D > 0) {
    const MatrixLD k_ld = kernel.gram(basis.points).cast<long double>();
    MatrixLD t_ld = basis.transfer.cast<long double>();
    const MatrixLD gram = t_ld * k_ld * t_ld.transpose();
    Eigen::LLT<MatrixLD> llt(gram);
    if (llt.info() == Eigen::Success) {
      llt.matrixL().solveInPlace(t_ld);
      basis.transfer = t_ld.cast<double>();
    }
  }
  return basis;
}

Eigen::VectorXd NewtonBasis::feature_of(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int D = size();
  Eigen::VectorXd kvec(D);
  for (int j = 0; j < D; ++j)
    kvec[j] = kernel.at_distance((x.transpose() - points.row(j)).norm());
  return transfer.triangularView<Eigen::Lower>() * kvec;
}

double NewtonBasis::power_function(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (size() == 0) return std::sqrt(kernel.at_distance(0.0));
  const Eigen::VectorXd f = feature_of(x);
  return std::sqrt(std::max(0.0, kernel.at_distance(0.0) - f.squaredNorm()));
}

Eigen::MatrixXd NewtonBasis::features_of(
    const Eigen::Ref<const Eigen::MatrixXd>& points_in, Exec exec) const {
  const Eigen::Index n = points_in.rows();
  Eigen::MatrixXd out(n, size());
  const bool parallel = exec == Exec::Parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index i = 0; i < n; ++i)
    out.row(i) = feature_of(points_in.row(i)).transpose();
  return out;
}

Eigen::MatrixXd NewtonBasis::basis_gram() const {
  // Evaluated in extended precision: the transfer entries are large enough
  // that the double-precision product cancels at ~1e-6, masking the actual
  // orthonormality of the basis.
  const MatrixLD k = kernel.gram(points).cast<long double>();
  const MatrixLD t = transfer.cast<long double>();
  return (t * k * t.transpose()).cast<double>();
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double cov = sxy - sx * sy / n;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  LineFit fit;
  if (vx <= 0.0 || vy <= 0.0) return fit;
  fit.slope = cov / vx;
  fit.r2 = (cov * cov) / (vx * vy);
  return fit;
}

}  // namespace

DecayReport decay_diagnostics(const NewtonBasis& basis) {
  DecayReport report;
  std::vector<double> m_pow, m_log, y;
  const double inv_d = 1.0 / static_cast<double>(basis.kernel.dim());
  for (size_t m = 1; m <= basis.residual_trace.size(); ++m) {
    const double v = basis.residual_trace[m - 1];
    if (v <= 0.0) continue;
    m_pow.push_back(std::pow(static_cast<double>(m), inv_d));
    m_log.push_back(std::log(static_cast<double>(m)));
    y.push_back(std::log(v));
  }
  if (y.size() < 3) {
    report.degenerate = true;
    return report;
  }
  double ymin = y[0], ymax = y[0];
  for (double v : y) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (ymax - ymin < 1e-12) {
    report.degenerate = true;
    return report;
  }
  const LineFit exp_fit = fit_line(m_pow, y);
  const LineFit poly_fit = fit_line(m_log, y);
  report.exp_slope = exp_fit.slope;
  report.exp_r2 = exp_fit.r2;
  report.poly_slope = poly_fit.slope;
  report.poly_r2 = poly_fit.r2;
  return report;
}

}  // namespace apgb
