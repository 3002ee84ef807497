#include "apgb/linalg_util.hpp"

namespace apgb {

namespace {
constexpr Eigen::Index kChunk = 256;
}

Eigen::VectorXd rowwise_quadratic(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const Eigen::Ref<const Eigen::MatrixXd>& m,
                                  Exec exec) {
  const Eigen::Index n = rows.rows();
  Eigen::VectorXd out(n);
  const Eigen::Index nchunks = (n + kChunk - 1) / kChunk;
  const bool parallel = exec == Exec::Parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index c = 0; c < nchunks; ++c) {
    const Eigen::Index lo = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - lo);
    const auto block = rows.middleRows(lo, len);
    const Eigen::MatrixXd g = block * m;
    out.segment(lo, len) = g.cwiseProduct(block).rowwise().sum();
  }
  return out;
}

}  // namespace apgb
