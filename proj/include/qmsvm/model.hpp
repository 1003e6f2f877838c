#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmsvm/data.hpp"
#include "qmsvm/kernel.hpp"
#include "qmsvm/qubo.hpp"
#include "qmsvm/sampler.hpp"

namespace qmsvm {

struct CombineConfig {
  std::size_t max_solutions = 100;  // S
  double multiplier = 10.0;
  // Survival threshold on validation accuracy. Absent = blended rule
  // 0.2*min + 0.8*max; present = fixed value.
  std::optional<double> fixed_threshold;
  bool dedup = false;  // drop repeated reads instead of counting them
};

struct TrainedModel {
  Matrix support;   // M x F
  Matrix tau_bar;   // M x C
  double gamma = 1.0;
  int num_classes = 0;
};

// Decode the S lowest-energy reads. A sample with occurrence k contributes
// k copies toward S unless dedup is set; ties are already ordered by bits.
std::vector<SolutionMatrix> rank_solutions(const SampleSet& ss,
                                           const QuboMeta& meta, std::size_t S,
                                           bool dedup = false);

// Class scores of val rows against the subset: entry (q, c) =
// sum_m Kvs(q, m) * tau(m, c).
Matrix decision_scores(const Matrix& tau, const Matrix& K_val_sub);

// Row argmax with ties toward the smallest class index.
std::vector<int> argmax_rows(const Matrix& scores);

double validation_accuracy(const SolutionMatrix& T, const Dataset& subset,
                           const Dataset& val, const KernelParams& kp);

// One shared val-by-subset kernel matrix for the whole batch, so the kernel
// cost is val.size() * subset.size() regardless of how many solutions are
// scored.
std::vector<double> validation_accuracies(std::span<const SolutionMatrix> sols,
                                          const Dataset& subset,
                                          const Dataset& val,
                                          const KernelParams& kp);

struct CombineResult {
  Matrix tau_bar;               // (1/S) * sum_s w_s * T_s, S = list length
  std::vector<double> weights;  // survivors softmaxed, discarded exactly 0
  double threshold = 0.0;
  std::size_t survivors = 0;
};

CombineResult combine(std::span<const SolutionMatrix> solutions,
                      std::span<const double> accuracies,
                      const CombineConfig& cfg);

// argmax_c sum_n tau_bar(n, c) * K(x, x_n); exactly M kernel evaluations per
// input row.
std::vector<int> predict(const TrainedModel& m, const Matrix& X);

// Versioned text format:
//   qmsvm-model v1 <M> <C> <F> <gamma>
//   M feature rows, then M tau rows, space-separated full-precision decimals.
void save_model(const TrainedModel& m, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace qmsvm
