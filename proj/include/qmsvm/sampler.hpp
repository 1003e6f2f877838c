#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmsvm/qubo.hpp"

namespace qmsvm {

struct Sample {
  std::vector<std::uint8_t> bits;
  double energy = 0.0;
  std::uint64_t occurrences = 1;
};

// Distinct states sorted by ascending energy, ties in lexicographic bit
// order. Energies are always recomputed locally from the problem.
struct SampleSet {
  std::vector<Sample> samples;
  std::uint64_t num_reads = 0;
};

inline constexpr std::size_t kExactDimLimit = 24;

// Enumerates all 2^dim states and returns every minimum-energy state with
// occurrence 1. num_reads equals the number of minima.
SampleSet solve_exact(const QuboProblem& q);

struct AnnealConfig {
  std::uint64_t num_reads = 1000;
  int sweeps = 100;
  double beta_hot = 0.1;    // initial inverse temperature
  double beta_cold = 10.0;  // final inverse temperature, > beta_hot
  std::uint64_t seed = 0;
};

// Schedule endpoints chosen from a sampled distribution of single-flip
// energy changes: the median uphill move starts ~50% accepted and ends at
// ~1e-4 acceptance.
AnnealConfig tuned_anneal_config(const QuboProblem& q, std::uint64_t num_reads,
                                 int sweeps, std::uint64_t seed);

// num_reads independent restarts; each runs `sweeps` full passes of
// single-bit Metropolis updates under a geometric beta_hot -> beta_cold
// schedule. Deterministic per seed, with one derived stream per read.
SampleSet solve_sa(const QuboProblem& q, const AnnealConfig& cfg);

struct RemoteConfig {
  std::string endpoint;  // e.g. http://localhost:8080/solve
  double timeout_seconds = 30.0;
  // Forwarded untouched inside the request (chain_strength, annealing_time,
  // and whatever else the service understands).
  std::map<std::string, std::string> passthrough;
};

// POSTs the problem as JSON and normalizes the response. Returned energies
// are recomputed locally; a server value that disagrees beyond 1e-6 relative
// is reported through `warnings` (or stderr when null) and replaced.
SampleSet solve_remote(const QuboProblem& q, const RemoteConfig& cfg,
                       std::uint64_t num_reads,
                       std::vector<std::string>* warnings = nullptr);

// Shared normalization: merge duplicate bitstrings, recompute energies, sort
// ascending by (energy, bits).
SampleSet normalize_samples(const QuboProblem& q,
                            std::vector<std::vector<std::uint8_t>> states);

}  // namespace qmsvm
