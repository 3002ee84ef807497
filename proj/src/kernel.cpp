#include "apgb/kernel.hpp"

#include <cmath>

namespace apgb {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::RationalQuadratic: return "rational_quadratic";
    case KernelFamily::SquaredExponential: return "squared_exponential";
    case KernelFamily::Matern: return "matern";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "rational_quadratic" || name == "rq")
    return KernelFamily::RationalQuadratic;
  if (name == "squared_exponential" || name == "se")
    return KernelFamily::SquaredExponential;
  if (name == "matern") return KernelFamily::Matern;
  throw std::invalid_argument(
      "unknown kernel family '" + name +
      "' (expected one of: rational_quadratic, squared_exponential, matern)");
}

Kernel::Kernel(KernelFamily family, int dim, double lengthscale,
               double rq_shape, double matern_nu)
    : family_(family),
      dim_(dim),
      lengthscale_(lengthscale),
      rq_shape_(rq_shape),
      matern_nu_(matern_nu) {
  if (dim <= 0) throw std::invalid_argument("kernel: dim must be positive");
  if (lengthscale <= 0.0)
    throw std::invalid_argument("kernel: lengthscale must be positive");
}

Kernel Kernel::rational_quadratic(int dim, double lengthscale, double shape) {
  if (!(shape > 0.5 * dim))
    throw std::invalid_argument("rational quadratic kernel requires mu > d/2");
  return Kernel(KernelFamily::RationalQuadratic, dim, lengthscale, shape, 0.0);
}

Kernel Kernel::squared_exponential(int dim, double lengthscale) {
  return Kernel(KernelFamily::SquaredExponential, dim, lengthscale, 0.0, 0.0);
}

Kernel Kernel::matern(int dim, double lengthscale, double nu) {
  if (nu != 0.5 && nu != 1.5 && nu != 2.5 && nu != 3.5)
    throw std::invalid_argument(
        "matern kernel: nu must be one of 1/2, 3/2, 5/2, 7/2");
  return Kernel(KernelFamily::Matern, dim, lengthscale, 0.0, nu);
}

double Kernel::at_distance(double s) const {
  switch (family_) {
    case KernelFamily::RationalQuadratic: {
      const double z = s / lengthscale_;
      return std::pow(1.0 + z * z / (2.0 * rq_shape_), -rq_shape_);
    }
    case KernelFamily::SquaredExponential: {
      const double z = s / lengthscale_;
      return std::exp(-0.5 * z * z);
    }
    case KernelFamily::Matern: {
      const double a = s * std::sqrt(2.0 * matern_nu_) / lengthscale_;
      if (matern_nu_ == 0.5) return std::exp(-a);
      if (matern_nu_ == 1.5) return (1.0 + a) * std::exp(-a);
      if (matern_nu_ == 2.5) return (1.0 + a + a * a / 3.0) * std::exp(-a);
      // nu = 7/2
      return (1.0 + a + 2.0 * a * a / 5.0 + a * a * a / 15.0) * std::exp(-a);
    }
  }
  return 0.0;
}

Eigen::MatrixXd Kernel::gram(
    const Eigen::Ref<const Eigen::MatrixXd>& points) const {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = at_distance(0.0);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = at_distance((points.row(i) - points.row(j)).norm());
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::MatrixXd Kernel::cross(const Eigen::Ref<const Eigen::MatrixXd>& a,
                              const Eigen::Ref<const Eigen::MatrixXd>& b) const {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      out(i, j) = at_distance((a.row(i) - b.row(j)).norm());
  return out;
}

}  // namespace apgb
