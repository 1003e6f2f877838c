#pragma once

#include <cstdint>
#include <vector>

#include "qmsvm/data.hpp"
#include "qmsvm/rng.hpp"

namespace qmsvm {

enum class SelectionMethod { random, kmeans };

struct SelectionConfig {
  SelectionMethod method = SelectionMethod::random;
  std::size_t subset_size = 60;  // M
  std::uint64_t seed = 0;
  int kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;
};

// M rows drawn uniformly without replacement, original order kept.
Dataset select_random(const Dataset& d, const SelectionConfig& cfg);

// Per-class k-means with k = M/C; the centroids become the subset, labeled
// with their class. Requires M divisible by C and every class to hold at
// least M/C examples.
Dataset select_kmeans(const Dataset& d, const SelectionConfig& cfg);

Dataset select(const Dataset& d, const SelectionConfig& cfg);

struct KmeansResult {
  Matrix centroids;                 // k x F
  std::vector<std::size_t> assignment;  // point -> centroid
  std::vector<double> wcss_trace;   // within-cluster sum of squares per pass
};

// Lloyd iterations with k-means++ seeding. Stops when the largest centroid
// movement drops below tol or after max_iter passes. Empty clusters reseed
// at the point farthest from its assigned centroid.
KmeansResult kmeans_cluster(const Matrix& points, std::size_t k, Rng& rng,
                            int max_iter, double tol);

}  // namespace qmsvm
