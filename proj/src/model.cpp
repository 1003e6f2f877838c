#include "qmsvm/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qmsvm {

std::vector<SolutionMatrix> rank_solutions(const SampleSet& ss,
                                           const QuboMeta& meta, std::size_t S,
                                           bool dedup) {
  if (ss.samples.empty()) throw DataError("rank_solutions: empty sample set");
  if (S < 1) throw ConfigError("rank_solutions: S must be >= 1");
  std::vector<SolutionMatrix> out;
  for (const auto& s : ss.samples) {
    if (out.size() >= S) break;
    const auto T = decode_bits(s.bits, meta.subset_size, meta.num_classes,
                               meta.bits_per_var);
    const std::uint64_t copies =
        dedup ? 1
              : std::min<std::uint64_t>(s.occurrences, S - out.size());
    for (std::uint64_t k = 0; k < copies; ++k) out.push_back(T);
  }
  return out;
}

Matrix decision_scores(const Matrix& tau, const Matrix& K_val_sub) {
  if (K_val_sub.cols() != tau.rows())
    throw DataError("decision_scores: kernel/tau shape mismatch");
  const std::size_t n = K_val_sub.rows();
  const std::size_t m = tau.rows();
  const std::size_t c_count = tau.cols();
  Matrix scores(n, c_count);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t i = 0; i < m; ++i) {
      const double k = K_val_sub(q, i);
      for (std::size_t c = 0; c < c_count; ++c)
        scores(q, c) += k * tau(i, c);
    }
  return scores;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = c;
    out[r] = static_cast<int>(best);
  }
  return out;
}

namespace {

double accuracy_against(const std::vector<int>& pred,
                        std::span<const int> truth) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

}  // namespace

double validation_accuracy(const SolutionMatrix& T, const Dataset& subset,
                           const Dataset& val, const KernelParams& kp) {
  const SolutionMatrix* one = &T;
  return validation_accuracies({one, 1}, subset, val, kp).front();
}

std::vector<double> validation_accuracies(std::span<const SolutionMatrix> sols,
                                          const Dataset& subset,
                                          const Dataset& val,
                                          const KernelParams& kp) {
  if (sols.empty()) throw DataError("validation_accuracies: no solutions");
  const Matrix K_vs = kernel_matrix(val.features, subset.features, kp);
  std::vector<double> out;
  out.reserve(sols.size());
  for (const auto& sol : sols) {
    if (sol.tau.rows() != subset.size() ||
        sol.tau.cols() != static_cast<std::size_t>(subset.num_classes))
      throw DataError("validation_accuracies: solution shape mismatch");
    const auto pred = argmax_rows(decision_scores(sol.tau, K_vs));
    out.push_back(accuracy_against(pred, val.labels));
  }
  return out;
}

CombineResult combine(std::span<const SolutionMatrix> solutions,
                      std::span<const double> accuracies,
                      const CombineConfig& cfg) {
  if (solutions.empty()) throw DataError("combine: no solutions");
  if (solutions.size() != accuracies.size())
    throw DataError("combine: " + std::to_string(solutions.size()) +
                    " solutions vs " + std::to_string(accuracies.size()) +
                    " accuracies");
  const std::size_t s_count = solutions.size();
  const std::size_t rows = solutions[0].tau.rows();
  const std::size_t cols = solutions[0].tau.cols();
  for (const auto& s : solutions)
    if (s.tau.rows() != rows || s.tau.cols() != cols)
      throw DataError("combine: inconsistent solution shapes");

  CombineResult res;
  if (cfg.fixed_threshold) {
    res.threshold = *cfg.fixed_threshold;
  } else {
    const auto [lo, hi] =
        std::minmax_element(accuracies.begin(), accuracies.end());
    // 0.2*lo + 0.8*hi, written so equal accuracies give threshold == hi
    // exactly and everything survives
    res.threshold = *lo + 0.8 * (*hi - *lo);
  }

  // Softmax over survivors only; everything below threshold gets weight 0.
  res.weights.assign(s_count, 0.0);
  double max_arg = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < s_count; ++s)
    if (accuracies[s] >= res.threshold)
      max_arg = std::max(max_arg, cfg.multiplier * accuracies[s]);
  if (!(max_arg > -std::numeric_limits<double>::infinity()))
    throw DataError("combine: threshold discards every solution");
  double total = 0.0;
  for (std::size_t s = 0; s < s_count; ++s) {
    if (accuracies[s] < res.threshold) continue;
    res.weights[s] = std::exp(cfg.multiplier * accuracies[s] - max_arg);
    total += res.weights[s];
    ++res.survivors;
  }
  for (auto& w : res.weights) w /= total;

  res.tau_bar = Matrix(rows, cols);
  for (std::size_t s = 0; s < s_count; ++s) {
    if (res.weights[s] == 0.0) continue;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        res.tau_bar(r, c) += res.weights[s] * solutions[s].tau(r, c);
  }
  const double inv_s = 1.0 / static_cast<double>(s_count);
  for (auto& v : res.tau_bar.data()) v *= inv_s;
  return res;
}

std::vector<int> predict(const TrainedModel& m, const Matrix& X) {
  if (X.cols() != m.support.cols())
    throw DataError("predict: input has " + std::to_string(X.cols()) +
                    " features, model expects " +
                    std::to_string(m.support.cols()));
  const Matrix K_xs = kernel_matrix(X, m.support, KernelParams{m.gamma});
  return argmax_rows(decision_scores(m.tau_bar, K_xs));
}

void save_model(const TrainedModel& m, const std::string& path) {
  if (m.support.rows() != m.tau_bar.rows())
    throw DataError("save_model: support/tau row mismatch");
  if (m.tau_bar.cols() != static_cast<std::size_t>(m.num_classes))
    throw DataError("save_model: tau columns do not match class count");
  std::ofstream out(path);
  if (!out) throw DataError("model: cannot write '" + path + "'");
  out << "qmsvm-model v1 " << m.support.rows() << ' ' << m.num_classes << ' '
      << m.support.cols() << ' ' << format_double(m.gamma) << '\n';
  const auto emit_rows = [&](const Matrix& mat) {
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      for (std::size_t c = 0; c < mat.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(mat(r, c));
      }
      out << '\n';
    }
  };
  emit_rows(m.support);
  emit_rows(m.tau_bar);
  if (!out) throw DataError("model: write failed for '" + path + "'");
}

namespace {

double parse_model_double(const std::string& token, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw DataError("model: line " + std::to_string(line_no) +
                    ": bad number '" + token + "'");
  return v;
}

}  // namespace

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("model: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("model: empty file");
  std::istringstream header(line);
  std::string magic, version;
  std::size_t m_rows = 0, f_cols = 0;
  int c_count = 0;
  std::string gamma_tok;
  if (!(header >> magic >> version >> m_rows >> c_count >> f_cols >>
        gamma_tok) ||
      magic != "qmsvm-model")
    throw DataError("model: corrupted header");
  if (version != "v1")
    throw DataError("model: unsupported version '" + version + "'");
  if (m_rows < 1 || c_count < 1 || f_cols < 1)
    throw DataError("model: invalid shape in header");

  TrainedModel m;
  m.num_classes = c_count;
  m.gamma = parse_model_double(gamma_tok, 1);
  if (!(m.gamma > 0.0) || !std::isfinite(m.gamma))
    throw DataError("model: gamma must be positive and finite");
  m.support = Matrix(m_rows, f_cols);
  m.tau_bar = Matrix(m_rows, static_cast<std::size_t>(c_count));

  std::size_t line_no = 1;
  const auto read_rows = [&](Matrix& mat, const char* what) {
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      if (!std::getline(in, line))
        throw DataError("model: truncated file in " + std::string(what) +
                        " rows");
      ++line_no;
      std::istringstream row(line);
      std::string tok;
      for (std::size_t c = 0; c < mat.cols(); ++c) {
        if (!(row >> tok))
          throw DataError("model: line " + std::to_string(line_no) +
                          ": expected " + std::to_string(mat.cols()) + " " +
                          what + " values");
        mat(r, c) = parse_model_double(tok, line_no);
      }
      if (row >> tok)
        throw DataError("model: line " + std::to_string(line_no) +
                        ": trailing token '" + tok + "'");
    }
  };
  read_rows(m.support, "feature");
  read_rows(m.tau_bar, "tau");
  if (!m.support.all_finite() || !m.tau_bar.all_finite())
    throw DataError("model: non-finite value");
  return m;
}

}  // namespace qmsvm
