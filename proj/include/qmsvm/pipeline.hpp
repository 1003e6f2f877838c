#pragma once

#include <cstdint>
#include <optional>

#include "qmsvm/data.hpp"
#include "qmsvm/kernel.hpp"
#include "qmsvm/model.hpp"
#include "qmsvm/qubo.hpp"
#include "qmsvm/sampler.hpp"
#include "qmsvm/selection.hpp"

namespace qmsvm {

enum class SamplerKind { exact, sa, remote };

struct PipelineConfig {
  SelectionConfig selection;
  KernelParams kernel;
  QmsvmParams qubo;
  SamplerKind sampler = SamplerKind::sa;
  std::uint64_t num_reads = 1000;
  int sweeps = 100;
  // Explicit schedule endpoints; tuned per instance when absent.
  std::optional<double> beta_hot;
  std::optional<double> beta_cold;
  RemoteConfig remote;
  CombineConfig combine;
  std::uint64_t seed = 0;  // master seed; selection and annealing derive from it
};

struct PhaseStats {
  double seconds = 0.0;
  std::uint64_t kernel_evals = 0;
};

struct TimingReport {
  std::size_t n = 0;  // training examples
  std::size_t m = 0;  // selected examples
  int c = 0;
  int b = 0;
  PhaseStats selection;
  PhaseStats sampling;   // kernel matrix + coefficient build + solve
  PhaseStats combination;
  PhaseStats inference;  // filled by callers that run prediction
};

struct TrainOutcome {
  TrainedModel model;
  TimingReport timing;
  double best_single_accuracy = 0.0;  // lowest-energy solution on val
  double combined_accuracy = 0.0;     // combined model on val, same kernels
  double threshold = 0.0;
  std::size_t survivors = 0;
  std::size_t solutions_ranked = 0;
  double ground_energy = 0.0;  // lowest sampled energy
};

// Selection -> coefficient build -> sampling -> ranked validation ->
// weighted combination. `val` defaults to the full training set. The
// combination phase computes exactly val.size() * M kernel evaluations; the
// shared matrix also scores the combined model.
TrainOutcome train_pipeline(const Dataset& train, const PipelineConfig& cfg,
                            const Dataset* val = nullptr);

}  // namespace qmsvm
