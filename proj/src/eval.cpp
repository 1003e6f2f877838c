#include "qmsvm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <string>

#include "qmsvm/rng.hpp"

namespace qmsvm {

Confusion::Confusion(std::span<const int> pred, std::span<const int> truth,
                     int num_classes)
    : c_(num_classes), total_(0),
      counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {
  if (pred.empty()) throw DataError("confusion: empty input");
  if (pred.size() != truth.size())
    throw DataError("confusion: " + std::to_string(pred.size()) +
                    " predictions vs " + std::to_string(truth.size()) +
                    " truths");
  if (num_classes < 1) throw ConfigError("confusion: class count must be >= 1");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= c_ || pred[i] < 0 || pred[i] >= c_)
      throw DataError("confusion: label outside [0, " + std::to_string(c_) +
                      ") at index " + std::to_string(i));
    ++counts_[static_cast<std::size_t>(truth[i]) * c_ + pred[i]];
    ++total_;
  }
}

std::uint64_t Confusion::at(int truth, int pred) const {
  return counts_[static_cast<std::size_t>(truth) * c_ + pred];
}

double Confusion::accuracy() const {
  std::uint64_t correct = 0;
  for (int c = 0; c < c_; ++c) correct += at(c, c);
  return static_cast<double>(correct) / static_cast<double>(total_);
}

double Confusion::macro_f1() const {
  double sum = 0.0;
  for (int c = 0; c < c_; ++c) {
    std::uint64_t tp = at(c, c), fn = 0, fp = 0;
    for (int o = 0; o < c_; ++o) {
      if (o == c) continue;
      fn += at(c, o);
      fp += at(o, c);
    }
    const double denom =
        static_cast<double>(tp) + 0.5 * static_cast<double>(fn + fp);
    sum += denom == 0.0 ? 1.0 : static_cast<double>(tp) / denom;
  }
  return sum / static_cast<double>(c_);
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  int c = 1;
  for (const int v : pred) c = std::max(c, v + 1);
  for (const int v : truth) c = std::max(c, v + 1);
  return Confusion(pred, truth, c).accuracy();
}

double macro_f1(std::span<const int> pred, std::span<const int> truth,
                int num_classes) {
  return Confusion(pred, truth, num_classes).macro_f1();
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<TimingReport> run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.sizes.empty()) throw ConfigError("benchmark: no sizes given");
  if (cfg.repetitions < 1)
    throw ConfigError("benchmark: repetitions must be >= 1");
  for (const std::size_t n : cfg.sizes)
    if (cfg.pipeline.selection.subset_size > n)
      throw ConfigError("benchmark: M=" +
                        std::to_string(cfg.pipeline.selection.subset_size) +
                        " exceeds N=" + std::to_string(n));

  const int c_count = cfg.blob_classes;
  const Dataset test = make_blobs(cfg.test_size, c_count, cfg.blob_features,
                                  cfg.blob_separation, cfg.blob_stddev,
                                  mix64(cfg.data_seed, 999));

  std::vector<TimingReport> reports;
  for (const std::size_t n : cfg.sizes) {
    const Dataset train = make_blobs(n, c_count, cfg.blob_features,
                                     cfg.blob_separation, cfg.blob_stddev,
                                     mix64(cfg.data_seed, n));
    std::vector<TimingReport> reps;
    for (int r = 0; r < cfg.repetitions; ++r) {
      TrainOutcome outcome = train_pipeline(train, cfg.pipeline);
      // inference phase: fixed test set against the trained model. The
      // pass runs in a few hundred microseconds, so it is sampled three
      // times after a warm-up and the median is kept; the counter window
      // spans a single pass.
      (void)predict(outcome.model, test.features);
      std::vector<double> passes(3);
      for (auto& sample : passes) {
        const auto evals_before = kernel_counter().value();
        const auto t0 = std::chrono::steady_clock::now();
        (void)predict(outcome.model, test.features);
        sample = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
        outcome.timing.inference.kernel_evals =
            kernel_counter().value() - evals_before;
      }
      outcome.timing.inference.seconds = median_of(passes);
      reps.push_back(outcome.timing);
    }
    TimingReport rep = reps.front();
    const auto phase_median = [&](PhaseStats TimingReport::*phase) {
      std::vector<double> secs;
      for (const auto& r : reps) secs.push_back((r.*phase).seconds);
      (rep.*phase).seconds = median_of(secs);
    };
    phase_median(&TimingReport::selection);
    phase_median(&TimingReport::sampling);
    phase_median(&TimingReport::combination);
    phase_median(&TimingReport::inference);
    reports.push_back(rep);
  }
  return reports;
}

void write_timing_csv(std::ostream& out,
                      std::span<const TimingReport> reports) {
  out << "N,phase,seconds,kernel_evals\n";
  for (const auto& r : reports) {
    const auto row = [&](const char* name, const PhaseStats& s) {
      out << r.n << ',' << name << ',' << format_double(s.seconds) << ','
          << s.kernel_evals << '\n';
    };
    row("selection", r.selection);
    row("sampling", r.sampling);
    row("combination", r.combination);
    row("inference", r.inference);
  }
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "dataset,N,M,accuracy,f1,seconds\n";
  for (const auto& r : rows)
    out << r.dataset << ',' << r.n << ',' << r.m << ','
        << format_double(r.accuracy) << ',' << format_double(r.f1) << ','
        << format_double(r.seconds) << '\n';
}

}  // namespace qmsvm
