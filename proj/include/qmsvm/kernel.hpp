#pragma once

#include <atomic>
#include <cstdint>
#include <span>

#include "qmsvm/common.hpp"

namespace qmsvm {

struct KernelParams {
  double gamma = 1.0;  // inverse squared length-scale, > 0
};

// Counts scalar kernel evaluations across the process. Monotone; phases are
// measured by taking snapshots, so no reset is exposed.
class EvalCounter {
public:
  void add(std::uint64_t k) noexcept {
    n_.fetch_add(k, std::memory_order_relaxed);
  }
  std::uint64_t value() const noexcept {
    return n_.load(std::memory_order_relaxed);
  }

private:
  std::atomic<std::uint64_t> n_{0};
};

EvalCounter& kernel_counter();

// exp(-gamma * ||x1 - x2||^2), in (0, 1] for finite inputs.
// Squared distance accumulates in index order, so the value is symmetric in
// its arguments down to the last bit.
double kernel(std::span<const double> x1, std::span<const double> x2,
              const KernelParams& p);

// Entry (i, j) = kernel(A_i, B_j). Adds rows(A)*rows(B) to the counter.
Matrix kernel_matrix(const Matrix& A, const Matrix& B, const KernelParams& p);

}  // namespace qmsvm
