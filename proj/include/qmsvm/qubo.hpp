#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmsvm/data.hpp"

namespace qmsvm {

struct QmsvmParams {
  int bits_per_var = 2;   // B, grid resolution of each encoded variable
  double beta = 1.0;      // margin reward weight
  double mu = 1.0;        // constraint penalty weight, >= 0
  // Largest-to-smallest magnitude ratio kept after pruning small couplings;
  // disabled when absent. Must exceed 1 when set.
  std::optional<double> max_min_ratio = 15.0;
};

// Decoded variables for one candidate solution: tau(n, c) in [-1, 1] on the
// 2^B-point uniform grid.
struct SolutionMatrix {
  Matrix tau;  // M x C
};

struct QuboEntry {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i <= j; i == j holds the linear bias
  double value = 0.0;
};

struct QuboMeta {
  std::size_t subset_size = 0;  // M
  int num_classes = 0;          // C
  int bits_per_var = 0;         // B
  std::optional<QmsvmParams> params;  // absent for problems read from disk
};

// Upper-triangular sparse quadratic form over binary variables. Entries are
// sorted by (i, j), contain no exact zeros, and satisfy i <= j < dim.
class QuboProblem {
public:
  QuboProblem(std::size_t dim, std::vector<QuboEntry> entries, QuboMeta meta);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<QuboEntry>& entries() const noexcept { return entries_; }
  const QuboMeta& meta() const noexcept { return meta_; }

private:
  std::size_t dim_;
  std::vector<QuboEntry> entries_;
  QuboMeta meta_;
};

// Bit b inside each B-bit block carries weight 2^b (LSB first). The block
// for (n, c) starts at n*C*B + c*B. Decoded value is (2*sigma - D) / D with
// D = 2^B - 1, so complementary codes are exact floating-point negatives.
SolutionMatrix decode_bits(std::span<const std::uint8_t> bits, std::size_t M,
                           int C, int B);

// Soft-constraint score: sum_n (sum_c tau_nc)^2 + sum_{n,c!=y_n} tau_nc.
// Negative values are possible; the quadratic part alone is nonnegative.
double penalty(const SolutionMatrix& T, std::span<const int> labels);

// Training objective: 1/2 sum_{n1,n2} K(n1,n2) sum_c tau_{n1 c} tau_{n2 c}
// minus beta * sum_n tau_{n, y_n}.
double objective(const SolutionMatrix& T, const Matrix& K_sub,
                 std::span<const int> labels, double beta);

// Analytic coefficient build for objective + mu * penalty over the encoded
// bits, folded to upper-triangular form, then pruned: off-diagonal entries
// smaller in magnitude than max|entry| / max_min_ratio are dropped.
// Constant offsets are omitted throughout, so only energy differences are
// meaningful.
QuboProblem build_qubo(const Dataset& subset, const Matrix& K_sub,
                       const QmsvmParams& p);

// sum over stored (i, j) of bits[i] * value * bits[j].
double energy(const QuboProblem& q, std::span<const std::uint8_t> bits);

// Text format: "qubo <dim> <M> <C> <B>" then one "i j value" line per entry.
void save_qubo(const QuboProblem& q, const std::string& path);
QuboProblem load_qubo(const std::string& path);

}  // namespace qmsvm
