#include "qmsvm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qmsvm {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return sq;
}

}  // namespace

Dataset select_random(const Dataset& d, const SelectionConfig& cfg) {
  validate(d);
  const std::size_t n = d.size();
  const std::size_t m = cfg.subset_size;
  if (m < 1) throw ConfigError("select_random: M must be >= 1");
  if (m > n)
    throw DataError("select_random: M=" + std::to_string(m) + " exceeds N=" +
                    std::to_string(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < m; ++i)
    std::swap(idx[i], idx[i + rng.below(n - i)]);
  std::vector<std::size_t> chosen(idx.begin(), idx.begin() + m);
  std::sort(chosen.begin(), chosen.end());

  Dataset out;
  out.num_classes = d.num_classes;
  out.class_names = d.class_names;
  out.features = Matrix(m, d.num_features());
  out.labels.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto src = d.features.row(chosen[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels[r] = d.labels[chosen[r]];
  }
  return out;
}

KmeansResult kmeans_cluster(const Matrix& points, std::size_t k, Rng& rng,
                            int max_iter, double tol) {
  const std::size_t n = points.rows();
  const std::size_t f = points.cols();
  if (k < 1 || k > n)
    throw DataError("kmeans: k=" + std::to_string(k) + " out of range for " +
                    std::to_string(n) + " points");

  // k-means++ seeding: D^2-weighted draws after a uniform first pick.
  Matrix centroids(k, f);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  {
    const std::size_t first = rng.below(n);
    std::copy(points.row(first).begin(), points.row(first).end(),
              centroids.row(0).begin());
    for (std::size_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], sq_dist(points.row(i), centroids.row(c - 1)));
        total += d2[i];
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        const double target = rng.unit() * total;
        double acc = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc > target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.below(n);  // all points coincide with chosen centroids
      }
      std::copy(points.row(pick).begin(), points.row(pick).end(),
                centroids.row(c).begin());
    }
  }

  KmeansResult res;
  res.assignment.assign(n, 0);
  std::vector<double> point_d2(n, 0.0);
  std::vector<std::size_t> counts(k, 0);
  Matrix sums(k, f);

  for (int pass = 0; pass < max_iter; ++pass) {
    // assignment step; ties go to the lowest centroid index
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(points.row(i), centroids.row(0));
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = sq_dist(points.row(i), centroids.row(c));
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      res.assignment[i] = best;
      point_d2[i] = best_d;
      wcss += best_d;
    }
    res.wcss_trace.push_back(wcss);

    // update step
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    std::fill(sums.data().begin(), sums.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = res.assignment[i];
      ++counts[c];
      const auto row = points.row(i);
      for (std::size_t j = 0; j < f; ++j) sums(c, j) += row[j];
    }

    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // reseed at the point farthest from its assigned centroid
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i)
          if (point_d2[i] > far_d) {
            far_d = point_d2[i];
            far = i;
          }
        point_d2[far] = -1.0;  // do not hand the same point to two clusters
        const auto row = points.row(far);
        double mv = sq_dist(row, centroids.row(c));
        std::copy(row.begin(), row.end(), centroids.row(c).begin());
        movement = std::max(movement, std::sqrt(mv));
        continue;
      }
      double mv = 0.0;
      for (std::size_t j = 0; j < f; ++j) {
        const double next = sums(c, j) / static_cast<double>(counts[c]);
        const double delta = next - centroids(c, j);
        mv += delta * delta;
        centroids(c, j) = next;
      }
      movement = std::max(movement, std::sqrt(mv));
    }
    if (movement < tol) break;
  }

  res.centroids = std::move(centroids);
  return res;
}

Dataset select_kmeans(const Dataset& d, const SelectionConfig& cfg) {
  validate(d);
  const std::size_t m = cfg.subset_size;
  const auto c_count = static_cast<std::size_t>(d.num_classes);
  if (m < 1) throw ConfigError("select_kmeans: M must be >= 1");
  if (m % c_count != 0)
    throw ConfigError("select_kmeans: M not divisible by C (M=" +
                      std::to_string(m) + ", C=" + std::to_string(c_count) +
                      ")");
  const std::size_t k = m / c_count;

  std::vector<std::vector<std::size_t>> by_class(c_count);
  for (std::size_t i = 0; i < d.size(); ++i)
    by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);
  for (std::size_t c = 0; c < c_count; ++c)
    if (by_class[c].size() < k)
      throw DataError("select_kmeans: class " + std::to_string(c) + " has " +
                      std::to_string(by_class[c].size()) +
                      " examples, fewer than M/C=" + std::to_string(k));

  Dataset out;
  out.num_classes = d.num_classes;
  out.class_names = d.class_names;
  out.features = Matrix(m, d.num_features());
  out.labels.resize(m);
  for (std::size_t c = 0; c < c_count; ++c) {
    Matrix points(by_class[c].size(), d.num_features());
    for (std::size_t r = 0; r < by_class[c].size(); ++r) {
      const auto src = d.features.row(by_class[c][r]);
      std::copy(src.begin(), src.end(), points.row(r).begin());
    }
    Rng rng(mix64(cfg.seed, c));  // one stream per class
    const auto res =
        kmeans_cluster(points, k, rng, cfg.kmeans_max_iter, cfg.kmeans_tol);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t dst = c * k + r;
      std::copy(res.centroids.row(r).begin(), res.centroids.row(r).end(),
                out.features.row(dst).begin());
      out.labels[dst] = static_cast<int>(c);
    }
  }
  return out;
}

Dataset select(const Dataset& d, const SelectionConfig& cfg) {
  return cfg.method == SelectionMethod::random ? select_random(d, cfg)
                                               : select_kmeans(d, cfg);
}

}  // namespace qmsvm
