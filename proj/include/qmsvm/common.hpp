#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmsvm {

// Error categories map onto CLI exit codes: config=2, data=3, sampler=4.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SamplerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles. Value-semantic; shape fixed at
// construction.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return a_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return a_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {a_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {a_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return a_; }
  std::vector<double>& data() noexcept { return a_; }

  bool all_finite() const {
    for (double v : a_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

// Locale-independent text form that reparses to the identical double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace qmsvm
