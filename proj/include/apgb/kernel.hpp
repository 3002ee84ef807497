#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace apgb {

enum class KernelFamily {
  RationalQuadratic,
  SquaredExponential,
  Matern,
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Symmetric positive definite kernel with normalized diagonal, K(x, x) = 1.
/// Evaluation is a pure function of the Euclidean distance s = ||x - y||.
/// Matern is restricted to half-integer nu in {1/2, 3/2, 5/2, 7/2} so the
/// closed-form polynomial-times-exponential expressions apply.
class Kernel {
 public:
  static Kernel rational_quadratic(int dim, double lengthscale, double shape);
  static Kernel squared_exponential(int dim, double lengthscale);
  static Kernel matern(int dim, double lengthscale, double nu);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  double lengthscale() const { return lengthscale_; }
  double rq_shape() const { return rq_shape_; }
  double matern_nu() const { return matern_nu_; }

  /// K as a function of the distance s >= 0.
  double at_distance(double s) const;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (x.size() != dim_ || y.size() != dim_)
      throw std::invalid_argument("kernel: point dimension mismatch");
    return at_distance((x - y).norm());
  }

  /// Kernel matrix for rows of `points` (n x d).
  Eigen::MatrixXd gram(const Eigen::Ref<const Eigen::MatrixXd>& points) const;

  /// Cross-kernel matrix, result(i, j) = K(a.row(i), b.row(j)).
  Eigen::MatrixXd cross(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::MatrixXd>& b) const;

 private:
  Kernel(KernelFamily family, int dim, double lengthscale, double rq_shape,
         double matern_nu);

  KernelFamily family_;
  int dim_;
  double lengthscale_;
  double rq_shape_;   // RQ only
  double matern_nu_;  // Matern only
};

}  // namespace apgb
