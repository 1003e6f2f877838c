#include "qmsvm/qubo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qmsvm {

namespace {

void check_params(const QmsvmParams& p) {
  if (p.bits_per_var < 1 || p.bits_per_var > 62)
    throw ConfigError("qubo: bits per variable must be in [1, 62], got " +
                      std::to_string(p.bits_per_var));
  if (!(p.mu >= 0.0) || !std::isfinite(p.mu))
    throw ConfigError("qubo: mu must be a nonnegative finite real");
  if (!std::isfinite(p.beta)) throw ConfigError("qubo: beta must be finite");
  if (p.max_min_ratio && !(*p.max_min_ratio > 1.0))
    throw ConfigError("qubo: max_min_ratio must exceed 1 when enabled");
}

void check_shape(const SolutionMatrix& T, std::span<const int> labels) {
  if (T.tau.rows() != labels.size())
    throw DataError("solution matrix has " + std::to_string(T.tau.rows()) +
                    " rows for " + std::to_string(labels.size()) + " labels");
  for (const int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= T.tau.cols())
      throw DataError("label " + std::to_string(y) + " outside [0, " +
                      std::to_string(T.tau.cols()) + ")");
}

}  // namespace

QuboProblem::QuboProblem(std::size_t dim, std::vector<QuboEntry> entries,
                         QuboMeta meta)
    : dim_(dim), entries_(std::move(entries)), meta_(std::move(meta)) {
  for (const auto& e : entries_) {
    if (e.i > e.j || e.j >= dim_)
      throw DataError("qubo: entry (" + std::to_string(e.i) + ", " +
                      std::to_string(e.j) + ") outside upper triangle of dim " +
                      std::to_string(dim_));
    if (e.value == 0.0) throw DataError("qubo: stored entry is exactly zero");
    if (!std::isfinite(e.value))
      throw DataError("qubo: non-finite entry value");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const QuboEntry& a, const QuboEntry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  for (std::size_t k = 1; k < entries_.size(); ++k)
    if (entries_[k - 1].i == entries_[k].i && entries_[k - 1].j == entries_[k].j)
      throw DataError("qubo: duplicate entry (" + std::to_string(entries_[k].i) +
                      ", " + std::to_string(entries_[k].j) + ")");
}

SolutionMatrix decode_bits(std::span<const std::uint8_t> bits, std::size_t M,
                           int C, int B) {
  if (C < 1 || B < 1) throw ConfigError("decode_bits: C and B must be >= 1");
  const std::size_t expected =
      M * static_cast<std::size_t>(C) * static_cast<std::size_t>(B);
  if (bits.size() != expected)
    throw DataError("decode_bits: got " + std::to_string(bits.size()) +
                    " bits, expected " + std::to_string(expected));
  const double denom = std::ldexp(1.0, B) - 1.0;  // 2^B - 1
  SolutionMatrix T{Matrix(M, static_cast<std::size_t>(C))};
  std::size_t at = 0;
  for (std::size_t n = 0; n < M; ++n)
    for (int c = 0; c < C; ++c) {
      double sigma = 0.0;
      for (int b = 0; b < B; ++b, ++at) {
        if (bits[at] > 1)
          throw DataError("decode_bits: bit value " +
                          std::to_string(int(bits[at])) + " at index " +
                          std::to_string(at));
        sigma += std::ldexp(static_cast<double>(bits[at]), b);
      }
      // (2*sigma - D) / D rather than -1 + 2*sigma/D: the symmetric form
      // makes tau(k) and tau(D - k) exact negatives, so balanced rows sum
      // to zero with no rounding residue.
      T.tau(n, static_cast<std::size_t>(c)) = (2.0 * sigma - denom) / denom;
    }
  return T;
}

double penalty(const SolutionMatrix& T, std::span<const int> labels) {
  check_shape(T, labels);
  const std::size_t C = T.tau.cols();
  double total = 0.0;
  for (std::size_t n = 0; n < T.tau.rows(); ++n) {
    double row_sum = 0.0;
    double off_label = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      row_sum += T.tau(n, c);
      if (c != static_cast<std::size_t>(labels[n])) off_label += T.tau(n, c);
    }
    total += row_sum * row_sum + off_label;
  }
  return total;
}

double objective(const SolutionMatrix& T, const Matrix& K_sub,
                 std::span<const int> labels, double beta) {
  check_shape(T, labels);
  const std::size_t M = T.tau.rows();
  const std::size_t C = T.tau.cols();
  if (K_sub.rows() != M || K_sub.cols() != M)
    throw DataError("objective: kernel matrix shape mismatch");
  double quad = 0.0;
  for (std::size_t n1 = 0; n1 < M; ++n1)
    for (std::size_t n2 = 0; n2 < M; ++n2) {
      double dot = 0.0;
      for (std::size_t c = 0; c < C; ++c) dot += T.tau(n1, c) * T.tau(n2, c);
      quad += K_sub(n1, n2) * dot;
    }
  double reward = 0.0;
  for (std::size_t n = 0; n < M; ++n)
    reward += T.tau(n, static_cast<std::size_t>(labels[n]));
  return 0.5 * quad - beta * reward;
}

QuboProblem build_qubo(const Dataset& subset, const Matrix& K_sub,
                       const QmsvmParams& p) {
  validate(subset);
  check_params(p);
  const std::size_t M = subset.size();
  const int C = subset.num_classes;
  const int B = p.bits_per_var;
  if (K_sub.rows() != M || K_sub.cols() != M)
    throw DataError("build_qubo: kernel matrix shape mismatch");
  if (!K_sub.all_finite())
    throw DataError("build_qubo: non-finite kernel value");

  const std::size_t dim =
      M * static_cast<std::size_t>(C) * static_cast<std::size_t>(B);
  const double denom = std::ldexp(1.0, B) - 1.0;
  const double denom2 = denom * denom;

  std::vector<double> row_sum(M, 0.0);
  for (std::size_t n = 0; n < M; ++n)
    for (std::size_t i = 0; i < M; ++i) row_sum[n] += K_sub(n, i);

  struct VarIndex {
    std::size_t n;
    int c, b;
  };
  std::vector<VarIndex> var(dim);
  for (std::size_t n = 0; n < M; ++n)
    for (int c = 0; c < C; ++c)
      for (int b = 0; b < B; ++b)
        var[(n * C + c) * B + b] = {n, c, b};

  // Symmetric coefficient of the bit pair (i, j) before folding. Three
  // contributions: a per-bit bias, a same-class kernel coupling, and a
  // same-example coupling from the squared row-sum penalty.
  const auto coeff = [&](std::size_t i, std::size_t j) {
    const auto [n1, c1, b1] = var[i];
    const auto [n2, c2, b2] = var[j];
    double v = 0.0;
    if (i == j) {
      const double same_label =
          c1 == subset.labels[n1] ? p.beta + p.mu : 0.0;
      v += std::ldexp(1.0, b1 + 1) / denom *
           (-row_sum[n1] - same_label - 2.0 * C * p.mu + p.mu);
    }
    if (c1 == c2)
      v += std::ldexp(1.0, b1 + b2 + 1) / denom2 * K_sub(n1, n2);
    if (n1 == n2) v += std::ldexp(1.0, b1 + b2 + 2) * p.mu / denom2;
    return v;
  };

  std::vector<QuboEntry> entries;
  entries.reserve(dim * (dim + 1) / 2);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) {
      const double v = i == j ? coeff(i, i) : coeff(i, j) + coeff(j, i);
      if (v == 0.0) continue;
      entries.push_back({static_cast<std::uint32_t>(i),
                         static_cast<std::uint32_t>(j), v});
      max_abs = std::max(max_abs, std::fabs(v));
    }

  if (p.max_min_ratio) {
    const double threshold = max_abs / *p.max_min_ratio;
    std::erase_if(entries, [&](const QuboEntry& e) {
      return e.i != e.j && std::fabs(e.value) < threshold;
    });
  }

  return QuboProblem(dim, std::move(entries),
                     QuboMeta{M, C, B, p});
}

double energy(const QuboProblem& q, std::span<const std::uint8_t> bits) {
  if (bits.size() != q.dim())
    throw DataError("energy: got " + std::to_string(bits.size()) +
                    " bits for dim " + std::to_string(q.dim()));
  double e = 0.0;
  for (const auto& [i, j, v] : q.entries())
    if (bits[i] && bits[j]) e += v;
  return e;
}

void save_qubo(const QuboProblem& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("qubo: cannot write '" + path + "'");
  out << "qubo " << q.dim() << ' ' << q.meta().subset_size << ' '
      << q.meta().num_classes << ' ' << q.meta().bits_per_var << '\n';
  for (const auto& [i, j, v] : q.entries())
    out << i << ' ' << j << ' ' << format_double(v) << '\n';
  if (!out) throw DataError("qubo: write failed for '" + path + "'");
}

namespace {

template <typename T>
T parse_number(std::string_view token, std::size_t line_no, const char* what) {
  T v{};
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw DataError("qubo: line " + std::to_string(line_no) + ": bad " + what +
                    " '" + std::string(token) + "'");
  return v;
}

std::vector<std::string_view> tokens_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r')
      ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

QuboProblem load_qubo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("qubo: cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("qubo: empty file");
  ++line_no;
  const auto header = tokens_of(line);
  if (header.size() != 5 || header[0] != "qubo")
    throw DataError("qubo: line 1: expected header 'qubo dim M C B'");
  const auto dim = parse_number<std::size_t>(header[1], 1, "dim");
  QuboMeta meta;
  meta.subset_size = parse_number<std::size_t>(header[2], 1, "M");
  meta.num_classes = parse_number<int>(header[3], 1, "C");
  meta.bits_per_var = parse_number<int>(header[4], 1, "B");

  std::vector<QuboEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() != 3)
      throw DataError("qubo: line " + std::to_string(line_no) +
                      ": expected 'i j value'");
    QuboEntry e;
    e.i = parse_number<std::uint32_t>(toks[0], line_no, "index i");
    e.j = parse_number<std::uint32_t>(toks[1], line_no, "index j");
    e.value = parse_number<double>(toks[2], line_no, "value");
    if (e.i > e.j || e.j >= dim)
      throw DataError("qubo: line " + std::to_string(line_no) + ": entry (" +
                      std::to_string(e.i) + ", " + std::to_string(e.j) +
                      ") outside upper triangle of dim " + std::to_string(dim));
    entries.push_back(e);
  }
  return QuboProblem(dim, std::move(entries), std::move(meta));
}

}  // namespace qmsvm
