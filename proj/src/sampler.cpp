#include "qmsvm/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "qmsvm/rng.hpp"

namespace qmsvm {

namespace {

// Per-variable view of the quadratic form: linear bias plus symmetric
// neighbor couplings, for O(degree) single-flip energy deltas.
struct Adjacency {
  std::vector<double> bias;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> neighbors;

  explicit Adjacency(const QuboProblem& q)
      : bias(q.dim(), 0.0), neighbors(q.dim()) {
    for (const auto& [i, j, v] : q.entries()) {
      if (i == j) {
        bias[i] += v;
      } else {
        neighbors[i].emplace_back(j, v);
        neighbors[j].emplace_back(i, v);
      }
    }
  }

  double flip_delta(const std::vector<std::uint8_t>& bits,
                    std::uint32_t k) const {
    double field = bias[k];
    for (const auto& [j, v] : neighbors[k])
      if (bits[j]) field += v;
    return bits[k] ? -field : field;
  }
};

}  // namespace

SampleSet normalize_samples(const QuboProblem& q,
                            std::vector<std::vector<std::uint8_t>> states) {
  std::sort(states.begin(), states.end());
  SampleSet out;
  for (auto& s : states) {
    if (!out.samples.empty() && out.samples.back().bits == s) {
      ++out.samples.back().occurrences;
    } else {
      Sample sample;
      sample.energy = energy(q, s);
      sample.bits = std::move(s);
      out.samples.push_back(std::move(sample));
    }
  }
  std::stable_sort(out.samples.begin(), out.samples.end(),
                   [](const Sample& a, const Sample& b) {
                     if (a.energy != b.energy) return a.energy < b.energy;
                     return a.bits < b.bits;
                   });
  for (const auto& s : out.samples) out.num_reads += s.occurrences;
  return out;
}

SampleSet solve_exact(const QuboProblem& q) {
  const std::size_t dim = q.dim();
  if (dim < 1) throw SamplerError("solve_exact: empty problem");
  if (dim > kExactDimLimit)
    throw SamplerError("solve_exact: dim " + std::to_string(dim) +
                       " exceeds enumeration bound " +
                       std::to_string(kExactDimLimit));

  const Adjacency adj(q);
  const std::uint64_t count = 1ULL << dim;

  // Gray-code walk: one bit flips per step, energy maintained incrementally.
  // The accumulated rounding is bounded away from real energy gaps, so a
  // loose margin collects candidate minima which are then recomputed
  // entry-by-entry.
  double scale = 1.0;
  for (const auto& e : q.entries()) scale += std::fabs(e.value);
  const double margin = 1e-7 * scale;

  std::vector<std::uint8_t> bits(dim, 0);
  double e = 0.0;
  double best = 0.0;
  for (std::uint64_t step = 1; step < count; ++step) {
    const auto k = static_cast<std::uint32_t>(std::countr_zero(step));
    e += adj.flip_delta(bits, k);
    bits[k] ^= 1u;
    best = std::min(best, e);
  }

  std::vector<std::uint64_t> candidates;
  std::fill(bits.begin(), bits.end(), 0);
  e = 0.0;
  std::uint64_t gray = 0;
  if (e <= best + margin) candidates.push_back(0);
  for (std::uint64_t step = 1; step < count; ++step) {
    const auto k = static_cast<std::uint32_t>(std::countr_zero(step));
    e += adj.flip_delta(bits, k);
    bits[k] ^= 1u;
    gray ^= 1ULL << k;
    if (e <= best + margin) candidates.push_back(gray);
  }

  const auto unpack = [dim](std::uint64_t code) {
    std::vector<std::uint8_t> b(dim);
    for (std::size_t i = 0; i < dim; ++i)
      b[i] = static_cast<std::uint8_t>((code >> i) & 1u);
    return b;
  };

  double exact_min = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::uint64_t>> scored;
  scored.reserve(candidates.size());
  for (const std::uint64_t code : candidates) {
    const auto b = unpack(code);
    const double ee = energy(q, b);
    scored.emplace_back(ee, code);
    exact_min = std::min(exact_min, ee);
  }
  const double tie_tol = 1e-12 * std::max(1.0, std::fabs(exact_min));

  std::vector<std::vector<std::uint8_t>> minima;
  for (const auto& [ee, code] : scored)
    if (ee - exact_min <= tie_tol) minima.push_back(unpack(code));
  return normalize_samples(q, std::move(minima));
}

AnnealConfig tuned_anneal_config(const QuboProblem& q, std::uint64_t num_reads,
                                 int sweeps, std::uint64_t seed) {
  const Adjacency adj(q);
  Rng rng(mix64(seed, 0x5ca1ab1eULL));
  std::vector<double> deltas;
  const std::size_t dim = q.dim();
  std::vector<std::uint8_t> bits(dim);
  for (int trial = 0; trial < 64; ++trial) {
    for (auto& b : bits) b = rng.coin() ? 1 : 0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d =
          std::fabs(adj.flip_delta(bits, static_cast<std::uint32_t>(k)));
      if (d > 0.0) deltas.push_back(d);
    }
  }
  AnnealConfig cfg;
  cfg.num_reads = num_reads;
  cfg.sweeps = sweeps;
  cfg.seed = seed;
  if (!deltas.empty()) {
    std::nth_element(deltas.begin(), deltas.begin() + deltas.size() / 2,
                     deltas.end());
    const double med = deltas[deltas.size() / 2];
    cfg.beta_hot = std::log(2.0) / med;          // ~50% initial acceptance
    cfg.beta_cold = std::log(1e4) / med;         // ~1e-4 final acceptance
  }
  return cfg;
}

SampleSet solve_sa(const QuboProblem& q, const AnnealConfig& cfg) {
  if (q.dim() < 1) throw SamplerError("solve_sa: empty problem");
  if (cfg.num_reads < 1) throw ConfigError("solve_sa: num_reads must be >= 1");
  if (cfg.sweeps < 1) throw ConfigError("solve_sa: sweeps must be >= 1");
  if (!(cfg.beta_hot > 0.0) || !(cfg.beta_cold > cfg.beta_hot))
    throw ConfigError("solve_sa: need beta_cold > beta_hot > 0");

  const Adjacency adj(q);
  const std::size_t dim = q.dim();

  std::vector<double> betas(static_cast<std::size_t>(cfg.sweeps));
  if (cfg.sweeps == 1) {
    betas[0] = cfg.beta_cold;
  } else {
    const double ratio = cfg.beta_cold / cfg.beta_hot;
    for (int s = 0; s < cfg.sweeps; ++s)
      betas[static_cast<std::size_t>(s)] =
          cfg.beta_hot * std::pow(ratio, double(s) / double(cfg.sweeps - 1));
  }

  std::vector<std::vector<std::uint8_t>> finals;
  finals.reserve(cfg.num_reads);
  std::vector<std::uint8_t> bits(dim);
  std::vector<double> field(dim);
  for (std::uint64_t read = 0; read < cfg.num_reads; ++read) {
    Rng rng(mix64(cfg.seed, read));
    for (auto& b : bits) b = rng.coin() ? 1 : 0;
    for (std::size_t k = 0; k < dim; ++k) {
      field[k] = adj.bias[k];
      for (const auto& [j, v] : adj.neighbors[k])
        if (bits[j]) field[k] += v;
    }
    for (const double beta : betas) {
      for (std::size_t k = 0; k < dim; ++k) {
        const double delta = bits[k] ? -field[k] : field[k];
        if (delta > 0.0 && rng.unit() >= std::exp(-beta * delta)) continue;
        const double sign = bits[k] ? -1.0 : 1.0;
        bits[k] ^= 1u;
        for (const auto& [j, v] : adj.neighbors[k]) field[j] += sign * v;
      }
    }
    finals.push_back(bits);
  }
  return normalize_samples(q, std::move(finals));
}

}  // namespace qmsvm
