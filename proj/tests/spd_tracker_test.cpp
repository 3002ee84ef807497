#include <doctest.h>

#include <cmath>
#include <random>

#include "apgb/spd_tracker.hpp"

using namespace apgb;

namespace {

Eigen::VectorXd random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = gauss(rng);
  return v / v.norm();
}

// Direct dense recomputation of A, inverse, and logdet from the update list.
struct DirectState {
  Eigen::MatrixXd a;
  explicit DirectState(int d, double lambda)
      : a(lambda * Eigen::MatrixXd::Identity(d, d)) {}
  void update(const Eigen::VectorXd& x) { a += x * x.transpose(); }
  Eigen::MatrixXd inverse() const { return a.inverse(); }
  double logdet(double lambda) const {
    return std::log((a / lambda).determinant());
  }
};

}  // namespace

TEST_CASE("scalar update: inverse 1/2 and logdet log 2") {
  SpdTracker tr(1, 1.0);
  Eigen::VectorXd x(1);
  x << 1.0;
  tr.rank1_update(x);
  CHECK(tr.inverse()(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tr.logdet() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("zero-vector update changes nothing") {
  SpdTracker tr(2, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd inv_before = tr.inverse();
  const double logdet_before = tr.logdet();
  tr.rank1_update(x);
  CHECK(tr.inverse() == inv_before);
  CHECK(tr.logdet() == logdet_before);
}

TEST_CASE("ten random updates match the dense factorization oracle") {
  std::mt19937_64 rng(5);
  SpdTracker tr(3, 1.0);
  DirectState direct(3, 1.0);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x = random_unit(3, rng);
    tr.rank1_update(x);
    direct.update(x);
  }
  CHECK((tr.inverse() - direct.inverse()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(tr.logdet() - direct.logdet(1.0)) < 1e-10);
}

TEST_CASE("mahalanobis at the initial state is the scaled euclidean norm") {
  SpdTracker tr(4, 2.5);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd x = random_unit(4, rng);
    CHECK(tr.mahalanobis(x) ==
          doctest::Approx(x.norm() / std::sqrt(2.5)).epsilon(1e-12));
  }
  CHECK(tr.mahalanobis(Eigen::VectorXd::Zero(4)) == 0.0);
}

TEST_CASE("mahalanobis matches a dense solve on a random state") {
  std::mt19937_64 rng(9);
  SpdTracker tr(3, 1.0);
  DirectState direct(3, 1.0);
  for (int i = 0; i < 25; ++i) {
    Eigen::VectorXd x = random_unit(3, rng);
    tr.rank1_update(x);
    direct.update(x);
  }
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd x = random_unit(3, rng);
    const double oracle = std::sqrt(x.dot(direct.a.ldlt().solve(x)));
    CHECK(tr.mahalanobis(x) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("sherman-morrison consistency identity") {
  // x^T (A + x x^T)^{-1} x = m^2 / (1 + m^2) with m^2 = x^T A^{-1} x.
  std::mt19937_64 rng(13);
  SpdTracker tr(5, 1.0);
  for (int i = 0; i < 30; ++i) tr.rank1_update(random_unit(5, rng));
  Eigen::VectorXd x = random_unit(5, rng);
  const double m2 = std::pow(tr.mahalanobis(x), 2);
  tr.rank1_update(x);
  const double after = std::pow(tr.mahalanobis(x), 2);
  CHECK(after == doctest::Approx(m2 / (1.0 + m2)).epsilon(1e-10));
}

TEST_CASE("drift stays below 1e-8 across refactorization periods") {
  std::mt19937_64 rng(21);
  const int d = 6;
  SpdTracker tr(d, 1.0);
  DirectState direct(d, 1.0);
  for (int i = 0; i < 2 * SpdTracker::kRefactorPeriod + 37; ++i) {
    Eigen::VectorXd x = random_unit(d, rng);
    tr.rank1_update(x);
    direct.update(x);
  }
  CHECK((tr.inverse() - direct.inverse()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(tr.logdet() - direct.logdet(1.0)) < 1e-8);
}

TEST_CASE("inverse stays symmetric positive definite") {
  std::mt19937_64 rng(33);
  SpdTracker tr(4, 1.0);
  for (int i = 0; i < 200; ++i) tr.rank1_update(random_unit(4, rng));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tr.inverse());
  CHECK(es.eigenvalues().minCoeff() > 1e-10 * es.eigenvalues().maxCoeff());
  CHECK((tr.inverse() - tr.inverse().transpose()).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(tr.logdet() >= 0.0);
}

TEST_CASE("gaussian sampling with vanishing scale returns the mean") {
  SpdTracker tr(3, 1.0);
  std::mt19937_64 rng(2);
  Eigen::VectorXd mean(3);
  mean << 0.3, -1.0, 2.0;
  Eigen::VectorXd draw = tr.sample_gaussian(mean, 1e-12, rng);
  CHECK((draw - mean).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("gaussian sampling empirical variance, D=1 identity state") {
  SpdTracker tr(1, 1.0);
  std::mt19937_64 rng(4);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(1);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = tr.sample_gaussian(mean, 1.0, rng)[0];
    sum += v;
    sumsq += v * v;
  }
  const double var = sumsq / n - (sum / n) * (sum / n);
  CHECK(var > 0.97);
  CHECK(var < 1.03);
}

TEST_CASE("gaussian sampling empirical covariance matches scale^2 inverse") {
  std::mt19937_64 rng(6);
  SpdTracker tr(3, 1.0);
  for (int i = 0; i < 12; ++i) tr.rank1_update(random_unit(3, rng));
  const double scale = 0.7;
  const Eigen::MatrixXd target = scale * scale * tr.inverse();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const int n = 100000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = tr.sample_gaussian(mean, scale, rng);
    acc += v * v.transpose();
  }
  acc /= n;
  CHECK((acc - target).norm() / target.norm() < 0.05);
}

TEST_CASE("sampling is deterministic given the seed") {
  std::mt19937_64 a(99), b(99);
  SpdTracker tr(2, 1.0);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  CHECK(tr.sample_gaussian(mean, 1.0, a) == tr.sample_gaussian(mean, 1.0, b));
}
