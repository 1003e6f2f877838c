#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmsvm/common.hpp"

namespace qmsvm {

// Labeled feature table. Immutable by convention once built; all producers
// return fresh values.
struct Dataset {
  Matrix features;               // N x F
  std::vector<int> labels;       // length N, each in [0, num_classes)
  int num_classes = 0;           // C
  std::vector<std::string> class_names;  // optional, size C when present

  std::size_t size() const { return features.rows(); }
  std::size_t num_features() const { return features.cols(); }
};

// Throws DataError if shapes, label ranges, or finiteness are violated.
void validate(const Dataset& d);

inline constexpr int kLastColumn = -1;

// CSV: comma-separated numeric cells, '#' comment lines, no quoting.
// label_column selects the integer label cell (kLastColumn = last).
// Errors carry 1-based file line numbers.
Dataset load_csv(const std::string& path, int label_column, int class_count);

// Unlabeled variant for prediction inputs. drop_column removes one column
// (kLastColumn = last) before interpreting the rest as features.
Matrix load_features(const std::string& path,
                     std::optional<int> drop_column = std::nullopt);

// Text round-trip partner of load_csv; features printed with enough digits
// to reparse bit-exactly.
void save_csv(const Dataset& d, const std::string& path);

// Disjoint partition with floor(fraction * N) rows in the first part.
// Deterministic per seed; original row order kept within each part.
std::pair<Dataset, Dataset> split(const Dataset& d, double fraction,
                                  std::uint64_t seed);

// Per-feature min-max rescale to [0, 1]; constant features map to 0.
Dataset normalize_minmax(const Dataset& d);

using Rgb = std::array<std::uint8_t, 3>;

struct RasterSpec {
  int width = 0;
  int height = 0;
  std::map<int, Rgb> palette;  // class index -> color
};

// Binary PPM (P6, maxval 255), row-major from the top-left pixel.
void export_map(std::span<const int> predictions, const RasterSpec& spec,
                const std::string& path);

// One class index per line.
void write_predictions(std::span<const int> predictions,
                       const std::string& path);
std::vector<int> read_predictions(const std::string& path);

// C isotropic Gaussian blobs in F dimensions. Class means sit on a circle in
// the first two coordinates so that adjacent means are `separation` apart
// (C=3 gives an equilateral triangle with that side). Labels round-robin.
Dataset make_blobs(std::size_t n, int num_classes, int num_features,
                   double separation, double stddev, std::uint64_t seed);

}  // namespace qmsvm
