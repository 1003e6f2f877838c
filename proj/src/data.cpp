#include "qmsvm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qmsvm/rng.hpp"

namespace qmsvm {

void validate(const Dataset& d) {
  const std::size_t n = d.features.rows();
  if (n == 0) throw DataError("dataset: no rows");
  if (d.features.cols() == 0) throw DataError("dataset: no feature columns");
  if (d.labels.size() != n)
    throw DataError("dataset: label count " + std::to_string(d.labels.size()) +
                    " does not match row count " + std::to_string(n));
  if (d.num_classes < 1) throw DataError("dataset: class count must be >= 1");
  for (std::size_t i = 0; i < n; ++i)
    if (d.labels[i] < 0 || d.labels[i] >= d.num_classes)
      throw DataError("dataset: row " + std::to_string(i + 1) + ": label " +
                      std::to_string(d.labels[i]) + " outside [0, " +
                      std::to_string(d.num_classes) + ")");
  if (!d.features.all_finite())
    throw DataError("dataset: non-finite feature value");
  if (!d.class_names.empty() &&
      d.class_names.size() != static_cast<std::size_t>(d.num_classes))
    throw DataError("dataset: class name list does not match class count");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool is_comment_or_blank(std::string_view line) {
  const std::string_view t = trim(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

double parse_feature(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw DataError("csv: line " + std::to_string(line_no) + ": cell '" +
                    std::string(cell) + "' is not numeric");
  if (!std::isfinite(v))
    throw DataError("csv: line " + std::to_string(line_no) +
                    ": non-finite feature value '" + std::string(cell) + "'");
  return v;
}

int parse_label(std::string_view cell, std::size_t line_no) {
  int v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw DataError("csv: line " + std::to_string(line_no) + ": label '" +
                    std::string(cell) + "' is not an integer");
  return v;
}

struct RawCsv {
  std::vector<std::vector<double>> rows;  // parsed as doubles, label kept raw
  std::vector<std::vector<std::string>> cells;
};

// Reads all data lines as string cells, enforcing identical arity.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open '" + path + "'");
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    auto cells = split_cells(line);
    if (rows.empty()) {
      arity = cells.size();
    } else if (cells.size() != arity) {
      throw DataError("csv: line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(arity));
    }
    std::vector<std::string> owned;
    owned.reserve(cells.size());
    for (auto c : cells) owned.emplace_back(c);
    rows.emplace_back(line_no, std::move(owned));
  }
  if (rows.empty()) throw DataError("csv: no rows in '" + path + "'");
  return rows;
}

std::size_t resolve_column(int requested, std::size_t arity,
                           const char* what) {
  if (requested == kLastColumn) return arity - 1;
  if (requested < 0 || static_cast<std::size_t>(requested) >= arity)
    throw DataError(std::string("csv: ") + what + " index " +
                    std::to_string(requested) + " outside row arity " +
                    std::to_string(arity));
  return static_cast<std::size_t>(requested);
}

}  // namespace

Dataset load_csv(const std::string& path, int label_column, int class_count) {
  if (class_count < 1)
    throw ConfigError("load_csv: class count must be >= 1");
  const auto rows = read_rows(path);
  const std::size_t arity = rows.front().second.size();
  if (arity < 2)
    throw DataError("csv: rows need at least one feature and a label");
  const std::size_t label_at = resolve_column(label_column, arity, "label column");

  Dataset d;
  d.num_classes = class_count;
  d.features = Matrix(rows.size(), arity - 1);
  d.labels.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    std::size_t f = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_at) continue;
      d.features(r, f++) = parse_feature(cells[c], line_no);
    }
    const int label = parse_label(cells[label_at], line_no);
    if (label < 0 || label >= class_count)
      throw DataError("csv: line " + std::to_string(line_no) + ": label " +
                      std::to_string(label) + " outside [0, " +
                      std::to_string(class_count) + ")");
    d.labels[r] = label;
  }
  validate(d);
  return d;
}

Matrix load_features(const std::string& path, std::optional<int> drop_column) {
  const auto rows = read_rows(path);
  const std::size_t arity = rows.front().second.size();
  std::size_t drop_at = arity;  // past-the-end = keep everything
  if (drop_column) {
    if (arity < 2)
      throw DataError("csv: cannot drop a column from single-column rows");
    drop_at = resolve_column(*drop_column, arity, "drop column");
  }
  const std::size_t width = drop_column ? arity - 1 : arity;
  Matrix X(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    std::size_t f = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == drop_at) continue;
      X(r, f++) = parse_feature(cells[c], line_no);
    }
  }
  return X;
}

void save_csv(const Dataset& d, const std::string& path) {
  validate(d);
  std::ofstream out(path);
  if (!out) throw DataError("csv: cannot write '" + path + "'");
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t c = 0; c < d.num_features(); ++c)
      out << format_double(d.features(r, c)) << ',';
    out << d.labels[r] << '\n';
  }
  if (!out) throw DataError("csv: write failed for '" + path + "'");
}

namespace {

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.num_classes = d.num_classes;
  out.class_names = d.class_names;
  out.features = Matrix(idx.size(), d.num_features());
  out.labels.resize(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = d.features.row(idx[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels[r] = d.labels[idx[r]];
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& d, double fraction,
                                  std::uint64_t seed) {
  validate(d);
  const std::size_t n = d.size();
  const auto first = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n)));
  if (first < 1 || first > n - 1)
    throw DataError("split: fraction " + format_double(fraction) +
                    " yields an empty part for N=" + std::to_string(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.below(i + 1)]);
  std::vector<std::size_t> a(idx.begin(), idx.begin() + first);
  std::vector<std::size_t> b(idx.begin() + first, idx.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {take_rows(d, a), take_rows(d, b)};
}

Dataset normalize_minmax(const Dataset& d) {
  validate(d);
  Dataset out = d;
  for (std::size_t c = 0; c < d.num_features(); ++c) {
    double lo = d.features(0, c), hi = d.features(0, c);
    for (std::size_t r = 1; r < d.size(); ++r) {
      lo = std::min(lo, d.features(r, c));
      hi = std::max(hi, d.features(r, c));
    }
    const double range = hi - lo;
    for (std::size_t r = 0; r < d.size(); ++r)
      out.features(r, c) =
          range > 0.0 ? (d.features(r, c) - lo) / range : 0.0;
  }
  return out;
}

void export_map(std::span<const int> predictions, const RasterSpec& spec,
                const std::string& path) {
  if (spec.width <= 0 || spec.height <= 0)
    throw DataError("export_map: empty raster");
  const std::size_t pixels =
      static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
  if (predictions.size() != pixels)
    throw DataError("export_map: " + std::to_string(predictions.size()) +
                    " predictions for " + std::to_string(pixels) + " pixels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("export_map: cannot write '" + path + "'");
  out << "P6\n" << spec.width << ' ' << spec.height << "\n255\n";
  std::vector<char> buf;
  buf.reserve(pixels * 3);
  for (const int cls : predictions) {
    const auto it = spec.palette.find(cls);
    if (it == spec.palette.end())
      throw DataError("export_map: class " + std::to_string(cls) +
                      " has no palette entry");
    buf.push_back(static_cast<char>(it->second[0]));
    buf.push_back(static_cast<char>(it->second[1]));
    buf.push_back(static_cast<char>(it->second[2]));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("export_map: write failed for '" + path + "'");
}

void write_predictions(std::span<const int> predictions,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("predictions: cannot write '" + path + "'");
  for (const int p : predictions) out << p << '\n';
  if (!out) throw DataError("predictions: write failed for '" + path + "'");
}

std::vector<int> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("predictions: cannot open '" + path + "'");
  std::vector<int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    out.push_back(parse_label(trim(line), line_no));
  }
  if (out.empty()) throw DataError("predictions: no rows in '" + path + "'");
  return out;
}

Dataset make_blobs(std::size_t n, int num_classes, int num_features,
                   double separation, double stddev, std::uint64_t seed) {
  if (n < 1) throw ConfigError("make_blobs: need at least one example");
  if (num_classes < 1) throw ConfigError("make_blobs: need at least one class");
  if (num_features < 2)
    throw ConfigError("make_blobs: need at least two features");
  if (!(stddev >= 0.0)) throw ConfigError("make_blobs: negative stddev");

  // Means on a circle in the first two coordinates; the radius makes
  // adjacent means exactly `separation` apart.
  const double pi = 3.14159265358979323846;
  const double radius =
      num_classes == 1 ? 0.0
                       : separation / (2.0 * std::sin(pi / num_classes));
  Matrix means(static_cast<std::size_t>(num_classes),
               static_cast<std::size_t>(num_features));
  for (int c = 0; c < num_classes; ++c) {
    const double angle = 2.0 * pi * c / num_classes;
    means(c, 0) = radius * std::cos(angle);
    means(c, 1) = radius * std::sin(angle);
  }

  Dataset d;
  d.num_classes = num_classes;
  d.features = Matrix(n, static_cast<std::size_t>(num_features));
  d.labels.resize(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % num_classes);
    d.labels[i] = cls;
    for (int f = 0; f < num_features; ++f)
      d.features(i, static_cast<std::size_t>(f)) =
          means(cls, static_cast<std::size_t>(f)) + stddev * rng.gaussian();
  }
  return d;
}

}  // namespace qmsvm
