#include "qmsvm/kernel.hpp"

#include <cmath>
#include <string>

namespace qmsvm {

EvalCounter& kernel_counter() {
  static EvalCounter counter;
  return counter;
}

namespace {

void check_gamma(const KernelParams& p) {
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma))
    throw ConfigError("kernel: gamma must be a positive finite real, got " +
                      format_double(p.gamma));
}

double rbf(std::span<const double> x1, std::span<const double> x2,
           double gamma) {
  double sq = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double d = x1[i] - x2[i];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

}  // namespace

double kernel(std::span<const double> x1, std::span<const double> x2,
              const KernelParams& p) {
  check_gamma(p);
  if (x1.size() != x2.size())
    throw DataError("kernel: dimension mismatch (" + std::to_string(x1.size()) +
                    " vs " + std::to_string(x2.size()) + ")");
  kernel_counter().add(1);
  return rbf(x1, x2, p.gamma);
}

Matrix kernel_matrix(const Matrix& A, const Matrix& B, const KernelParams& p) {
  check_gamma(p);
  if (A.cols() != B.cols())
    throw DataError("kernel_matrix: feature dimension mismatch (" +
                    std::to_string(A.cols()) + " vs " +
                    std::to_string(B.cols()) + ")");
  Matrix K(A.rows(), B.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto a = A.row(i);
    for (std::size_t j = 0; j < B.rows(); ++j)
      K(i, j) = rbf(a, B.row(j), p.gamma);
  }
  kernel_counter().add(static_cast<std::uint64_t>(A.rows()) * B.rows());
  return K;
}

}  // namespace qmsvm
