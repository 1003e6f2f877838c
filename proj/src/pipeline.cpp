#include "qmsvm/pipeline.hpp"

#include <chrono>

#include "qmsvm/rng.hpp"

namespace qmsvm {

namespace {

class PhaseTimer {
public:
  PhaseTimer() : start_(std::chrono::steady_clock::now()),
                 evals_(kernel_counter().value()) {}

  PhaseStats stop() const {
    PhaseStats s;
    s.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start_)
                    .count();
    s.kernel_evals = kernel_counter().value() - evals_;
    return s;
  }

private:
  std::chrono::steady_clock::time_point start_;
  std::uint64_t evals_;
};

}  // namespace

TrainOutcome train_pipeline(const Dataset& train, const PipelineConfig& cfg,
                            const Dataset* val) {
  validate(train);
  const Dataset& validation = val ? *val : train;
  if (val) validate(*val);

  TrainOutcome out;
  out.timing.n = train.size();
  out.timing.m = cfg.selection.subset_size;
  out.timing.c = train.num_classes;
  out.timing.b = cfg.qubo.bits_per_var;

  SelectionConfig sel = cfg.selection;
  sel.seed = mix64(cfg.seed, 1);

  PhaseTimer t_sel;
  const Dataset subset = select(train, sel);
  out.timing.selection = t_sel.stop();

  PhaseTimer t_samp;
  const Matrix K_sub = kernel_matrix(subset.features, subset.features,
                                     cfg.kernel);
  const QuboProblem q = build_qubo(subset, K_sub, cfg.qubo);
  SampleSet samples;
  switch (cfg.sampler) {
    case SamplerKind::exact:
      samples = solve_exact(q);
      break;
    case SamplerKind::sa: {
      AnnealConfig anneal = tuned_anneal_config(q, cfg.num_reads, cfg.sweeps,
                                                mix64(cfg.seed, 2));
      if (cfg.beta_hot) anneal.beta_hot = *cfg.beta_hot;
      if (cfg.beta_cold) anneal.beta_cold = *cfg.beta_cold;
      samples = solve_sa(q, anneal);
      break;
    }
    case SamplerKind::remote:
      samples = solve_remote(q, cfg.remote, cfg.num_reads);
      break;
  }
  out.timing.sampling = t_samp.stop();
  out.ground_energy = samples.samples.front().energy;

  PhaseTimer t_comb;
  const auto solutions = rank_solutions(samples, q.meta(),
                                        cfg.combine.max_solutions,
                                        cfg.combine.dedup);
  out.solutions_ranked = solutions.size();

  // One shared kernel matrix scores every candidate and the combined model.
  const Matrix K_vs =
      kernel_matrix(validation.features, subset.features, cfg.kernel);
  std::vector<double> accuracies;
  accuracies.reserve(solutions.size());
  for (const auto& solution : solutions) {
    const auto pred = argmax_rows(decision_scores(solution.tau, K_vs));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == validation.labels[i]) ++hits;
    accuracies.push_back(static_cast<double>(hits) /
                         static_cast<double>(pred.size()));
  }
  out.best_single_accuracy = accuracies.front();

  const CombineResult combined = combine(solutions, accuracies, cfg.combine);
  out.threshold = combined.threshold;
  out.survivors = combined.survivors;

  out.model.support = subset.features;
  out.model.tau_bar = combined.tau_bar;
  out.model.gamma = cfg.kernel.gamma;
  out.model.num_classes = subset.num_classes;

  {
    const auto pred = argmax_rows(decision_scores(out.model.tau_bar, K_vs));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == validation.labels[i]) ++hits;
    out.combined_accuracy =
        static_cast<double>(hits) / static_cast<double>(validation.size());
  }
  out.timing.combination = t_comb.stop();

  return out;
}

}  // namespace qmsvm
