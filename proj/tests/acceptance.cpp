// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qmsvm/data.hpp"
#include "qmsvm/eval.hpp"
#include "qmsvm/kernel.hpp"
#include "qmsvm/model.hpp"
#include "qmsvm/pipeline.hpp"
#include "qmsvm/qubo.hpp"
#include "qmsvm/rng.hpp"
#include "qmsvm/sampler.hpp"

using namespace qmsvm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Dataset random_subset(std::size_t m, int classes, Rng& rng) {
  Dataset d;
  d.num_classes = classes;
  d.features = Matrix(m, 3);
  for (auto& v : d.features.data()) v = rng.gaussian();
  d.labels.resize(m);
  for (auto& l : d.labels) l = static_cast<int>(rng.below(classes));
  return d;
}

std::vector<std::uint8_t> random_bits(std::size_t dim, Rng& rng) {
  std::vector<std::uint8_t> bits(dim);
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return bits;
}

// --- criterion 1: energy differences vs decoded objective, 50 x 1000 ------

Outcome qubo_correctness() {
  Rng rng(20250801);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t m = 1 + rng.below(6);
    const int classes = 2 + static_cast<int>(rng.below(2));
    const int bits_per_var = 1 + static_cast<int>(rng.below(3));
    QmsvmParams p;
    p.bits_per_var = bits_per_var;
    p.beta = 2.0 * rng.unit();
    p.mu = 2.0 * rng.unit();
    p.max_min_ratio.reset();

    const Dataset d = random_subset(m, classes, rng);
    const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
    const QuboProblem q = build_qubo(d, K, p);

    for (int pair = 0; pair < 1000; ++pair) {
      const auto a1 = random_bits(q.dim(), rng);
      const auto a2 = random_bits(q.dim(), rng);
      const double de = energy(q, a1) - energy(q, a2);
      const auto t1 = decode_bits(a1, m, classes, bits_per_var);
      const auto t2 = decode_bits(a2, m, classes, bits_per_var);
      const double df = (oracle::objective(t1.tau, K, d.labels, p.beta) +
                         p.mu * oracle::penalty(t1.tau, d.labels)) -
                        (oracle::objective(t2.tau, K, d.labels, p.beta) +
                         p.mu * oracle::penalty(t2.tau, d.labels));
      const double err =
          std::fabs(de - df) / std::max(1.0, std::fabs(df));
      worst = std::max(worst, err);
      if (err > 1e-9) {
        std::ostringstream s;
        s << "instance " << instance << " pair " << pair << " error " << err;
        return {false, s.str()};
      }
    }
  }
  std::ostringstream s;
  s << "50 instances x 1000 pairs, worst relative error "
    << format_double(worst);
  return {true, s.str()};
}

// --- criterion 2: encoding grid -------------------------------------------

Outcome encoding_grid() {
  for (int B = 1; B <= 4; ++B) {
    const double denom = double((1 << B) - 1);
    for (int k = 0; k < (1 << B); ++k) {
      std::vector<std::uint8_t> bits(B);
      for (int b = 0; b < B; ++b)
        bits[b] = static_cast<std::uint8_t>((k >> b) & 1);
      const double got = decode_bits(bits, 1, 1, B).tau(0, 0);
      const double expected = (2.0 * k - denom) / denom;
      if (std::fabs(got - expected) > 1e-15)
        return {false, "B=" + std::to_string(B) + " code " + std::to_string(k)};
    }
  }
  const double third = 1.0 / 3.0;
  const double grid2[4] = {-1.0, -third, third, 1.0};
  for (int k = 0; k < 4; ++k) {
    std::vector<std::uint8_t> bits{static_cast<std::uint8_t>(k & 1),
                                   static_cast<std::uint8_t>((k >> 1) & 1)};
    const double got = decode_bits(bits, 1, 1, 2).tau(0, 0);
    if (std::fabs(got - grid2[k]) > 1e-15)
      return {false, "B=2 grid point " + std::to_string(k)};
  }
  return {true, "grids for B in 1..4 exact; B=2 = {-1, -1/3, 1/3, 1}"};
}

// --- criterion 3: SA finds exact ground states -----------------------------

Outcome sampler_fidelity() {
  Rng rng(777001);
  int hits = 0;
  for (int instance = 0; instance < 20; ++instance) {
    Dataset d = random_subset(3, 3, rng);
    const Matrix K = kernel_matrix(d.features, d.features, KernelParams{1.0});
    QmsvmParams p;  // B=2 default
    p.max_min_ratio.reset();
    const QuboProblem q = build_qubo(d, K, p);
    const SampleSet exact = solve_exact(q);
    std::set<std::vector<std::uint8_t>> ground;
    for (const auto& s : exact.samples) ground.insert(s.bits);
    const SampleSet sa =
        solve_sa(q, tuned_anneal_config(q, 1000, 100, 9000 + instance));
    bool found = false;
    for (const auto& s : sa.samples)
      if (ground.count(s.bits)) {
        found = true;
        break;
      }
    if (found) ++hits;
  }
  std::ostringstream s;
  s << hits << "/20 instances contain the exact ground state";
  return {hits >= 19, s.str()};
}

// --- criterion 4: heavy penalty forces balanced rows ------------------------

Outcome constraint_satisfaction() {
  Rng rng(424242);
  for (std::size_t m = 1; m <= 4; ++m) {
    for (int instance = 0; instance < 3; ++instance) {
      const Dataset d = random_subset(m, 2, rng);
      const Matrix K =
          kernel_matrix(d.features, d.features, KernelParams{1.0});
      double max_k = 0.0;
      for (const double v : K.data()) max_k = std::max(max_k, std::fabs(v));
      QmsvmParams p;
      p.bits_per_var = 2;
      p.mu = 100.0 * max_k;
      p.max_min_ratio.reset();
      const QuboProblem q = build_qubo(d, K, p);
      const SampleSet ss = solve_exact(q);
      for (const auto& s : ss.samples) {
        const auto T = decode_bits(s.bits, m, 2, 2);
        for (std::size_t n = 0; n < m; ++n) {
          const double row_sum = T.tau(n, 0) + T.tau(n, 1);
          if (row_sum != 0.0) {
            std::ostringstream msg;
            msg << "M=" << m << " ground state row " << n << " sums to "
                << format_double(row_sum);
            return {false, msg.str()};
          }
        }
      }
    }
  }
  return {true, "all ground-state rows sum to zero exactly (M=1..4, x3 each)"};
}

// --- criterion 5: end-to-end learning on blobs ------------------------------

Outcome desk_scale_learning() {
  const Dataset test = make_blobs(1000, 3, 2, 5.0, 1.0, 555000);
  std::vector<double> accuracies;
  for (int seed = 0; seed < 5; ++seed) {
    const Dataset train = make_blobs(3000, 3, 2, 5.0, 1.0, 100 + seed);
    PipelineConfig cfg;  // library defaults: M=60, B=2, 1000 reads, S=100
    cfg.seed = static_cast<std::uint64_t>(seed);
    const TrainOutcome out = train_pipeline(train, cfg);
    const auto pred = predict(out.model, test.features);
    accuracies.push_back(accuracy(pred, test.labels));
  }
  std::vector<double> sorted = accuracies;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[2];
  std::ostringstream s;
  s << "median held-out accuracy " << format_double(median) << " over seeds [";
  for (std::size_t i = 0; i < accuracies.size(); ++i)
    s << (i ? " " : "") << format_double(accuracies[i]);
  s << "]";
  return {median >= 0.95, s.str()};
}

// --- criterion 6: scaling counters and trends -------------------------------

Outcome scaling_claims() {
  BenchmarkConfig cfg;
  cfg.sizes = {1000, 2000, 4000};
  cfg.test_size = 500;
  cfg.repetitions = 7;
  cfg.pipeline.seed = 31;
  cfg.data_seed = 606;
  const auto reports = run_benchmark(cfg);
  if (reports.size() != 3) return {false, "expected 3 reports"};

  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = reports[i];
    if (r.inference.kernel_evals != reports[0].inference.kernel_evals)
      return {false, "inference kernel counts differ across N"};
    if (r.combination.kernel_evals != r.n * 60) {
      std::ostringstream s;
      s << "combination kernel count " << r.combination.kernel_evals
        << " != N*M = " << r.n * 60;
      return {false, s.str()};
    }
  }
  if (reports[1].combination.kernel_evals !=
          2 * reports[0].combination.kernel_evals ||
      reports[2].combination.kernel_evals !=
          4 * reports[0].combination.kernel_evals)
    return {false, "combination counters are not 1:2:4"};

  double lo = 1e300, hi = 0.0;
  for (const auto& r : reports) {
    lo = std::min(lo, r.inference.seconds);
    hi = std::max(hi, r.inference.seconds);
  }
  const double spread = (hi - lo) / hi;
  const bool combination_increases =
      reports[0].combination.seconds < reports[1].combination.seconds &&
      reports[1].combination.seconds < reports[2].combination.seconds;
  const bool selection_cheap =
      reports.back().selection.seconds < reports.back().combination.seconds;
  if (!selection_cheap)
    return {false, "random selection slower than combination at N=4000"};

  std::ostringstream s;
  s << "inference counters constant (" << reports[0].inference.kernel_evals
    << "), combination counters 1:2:4, inference time spread "
    << format_double(100.0 * spread) << "%, combination seconds "
    << format_double(reports[0].combination.seconds) << " -> "
    << format_double(reports[1].combination.seconds) << " -> "
    << format_double(reports[2].combination.seconds);
  return {spread < 0.25 && combination_increases, s.str()};
}

// --- criterion 7: metric oracles --------------------------------------------

Outcome metric_oracles() {
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> pred{0, 1, 1, 1};
  const double f1 = macro_f1(pred, truth, 2);
  const double acc = accuracy(pred, truth);
  std::ostringstream s;
  s << "macro-F1 " << format_double(f1) << ", accuracy " << format_double(acc);
  return {std::fabs(f1 - 11.0 / 15.0) <= 1e-12 && acc == 0.75, s.str()};
}

// --- criterion 8: combination semantics -------------------------------------

Outcome combination_semantics() {
  Rng rng(88);
  SolutionMatrix t1{Matrix(4, 3)}, t2{Matrix(4, 3)};
  for (auto& v : t1.tau.data()) v = 2.0 * rng.unit() - 1.0;
  for (auto& v : t2.tau.data()) v = 2.0 * rng.unit() - 1.0;
  const std::vector<SolutionMatrix> sols{t1, t2};
  const std::vector<double> accs{0.5, 0.9};
  CombineConfig cfg;
  cfg.multiplier = 10.0;
  const auto res = combine(sols, accs, cfg);
  if (res.weights[0] != 0.0 || res.weights[1] != 1.0)
    return {false, "weights are not exactly [0, 1]"};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      if (res.tau_bar(r, c) != t2.tau(r, c) / 2.0)
        return {false, "tau_bar != T2 / S"};

  TrainedModel m;
  m.support = Matrix(4, 2);
  for (auto& v : m.support.data()) v = rng.gaussian();
  m.tau_bar = res.tau_bar;
  m.gamma = 1.0;
  m.num_classes = 3;
  Matrix X(50, 2);
  for (auto& v : X.data()) v = 2.0 * rng.gaussian();
  const auto base = predict(m, X);
  for (const double lambda : {0.1, 1.0, 10.0}) {
    TrainedModel scaled = m;
    for (auto& v : scaled.tau_bar.data()) v *= lambda;
    if (predict(scaled, X) != base)
      return {false, "argmax changed under scale " + format_double(lambda)};
  }
  return {true, "weights [0, 1], tau_bar = T2/S, argmax scale-invariant"};
}

// --- criterion 9: deterministic training via the CLI ------------------------

Outcome determinism() {
#ifndef QMSVM_CLI_PATH
  return {false, "CLI path not wired into the build"};
#else
  oracle::TempDir tmp("qmsvm-accept");
  const Dataset train = make_blobs(600, 3, 2, 5.0, 1.0, 99);
  const auto csv = tmp.file("train.csv");
  save_csv(train, csv);
  const auto m1 = tmp.file("m1.txt");
  const auto m2 = tmp.file("m2.txt");
  const std::string base = std::string(QMSVM_CLI_PATH) + " train --data " +
                           csv +
                           " --m 30 --num-reads 200 --sweeps 50 --s 50"
                           " --seed 2024 --model ";
  const std::string quiet = " > /dev/null 2>&1";
  if (std::system((base + m1 + quiet).c_str()) != 0)
    return {false, "first train run failed"};
  if (std::system((base + m2 + quiet).c_str()) != 0)
    return {false, "second train run failed"};
  const auto b1 = oracle::slurp(m1);
  const auto b2 = oracle::slurp(m2);
  if (b1.empty()) return {false, "model file empty"};
  if (b1 != b2) return {false, "model files differ"};
  std::ostringstream s;
  s << "two runs, " << b1.size() << " identical bytes";
  return {true, s.str()};
#endif
}

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "QUBO energy matches decoded objective", 30.0, qubo_correctness},
      {2, "encoding grid exact for B in 1..4", 30.0, encoding_grid},
      {3, "SA recovers exact ground states", 60.0, sampler_fidelity},
      {4, "heavy penalty yields balanced rows", 60.0, constraint_satisfaction},
      {5, "desk-scale learning reaches 0.95", 120.0, desk_scale_learning},
      {6, "scaling counters and time trends", 180.0, scaling_claims},
      {7, "metric oracles", 30.0, metric_oracles},
      {8, "combination semantics", 30.0, combination_semantics},
      {9, "deterministic training", 120.0, determinism},
  };

  int passed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = seconds < c.budget_seconds;
    const bool pass = outcome.pass && in_budget;
    if (pass) ++passed;
    std::printf("%s criterion %d: %s — %s (%.2f s / budget %.0f s)\n",
                pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
                outcome.detail.c_str(), seconds, c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("SUMMARY: %d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
