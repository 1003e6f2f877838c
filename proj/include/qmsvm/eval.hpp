#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qmsvm/pipeline.hpp"

namespace qmsvm {

// Row = true class, column = predicted class.
class Confusion {
public:
  Confusion(std::span<const int> pred, std::span<const int> truth,
            int num_classes);

  int num_classes() const noexcept { return c_; }
  std::uint64_t at(int truth, int pred) const;
  std::uint64_t total() const noexcept { return total_; }

  double accuracy() const;
  // Unweighted mean over classes of TP / (TP + (FN + FP) / 2). A class
  // absent from both vectors scores 1 (the 0/0 convention).
  double macro_f1() const;

private:
  int c_;
  std::uint64_t total_;
  std::vector<std::uint64_t> counts_;
};

double accuracy(std::span<const int> pred, std::span<const int> truth);
double macro_f1(std::span<const int> pred, std::span<const int> truth,
                int num_classes);

struct BenchmarkConfig {
  std::vector<std::size_t> sizes;  // training-set sizes to sweep
  std::size_t test_size = 500;     // fixed held-out set shared by all sizes
  int repetitions = 3;             // timing = median over repetitions
  PipelineConfig pipeline;
  int blob_classes = 3;
  int blob_features = 2;
  double blob_separation = 5.0;
  double blob_stddev = 1.0;
  std::uint64_t data_seed = 1;
};

// Full train + inference per size, phase wall-clock and kernel counters
// recorded. Counters are identical across repetitions; seconds are medians.
std::vector<TimingReport> run_benchmark(const BenchmarkConfig& cfg);

// Header: N,phase,seconds,kernel_evals — four phase rows per size.
void write_timing_csv(std::ostream& out, std::span<const TimingReport> reports);

struct MetricsRow {
  std::string dataset;
  std::size_t n = 0;
  std::size_t m = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  double seconds = 0.0;
};

// Header: dataset,N,M,accuracy,f1,seconds
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

}  // namespace qmsvm
