// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#include "reqrnn/numcore.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "reqrnn/error.hpp"
#include "reqrnn/rng.hpp"

namespace reqrnn {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InputError(std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

std::string len_string(std::size_t n) { return "[" + std::to_string(n) + "]"; }

void require_same_len(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw StructuralError(std::string(op) + ": length mismatch " + len_string(a.size()) + " vs " +
                          len_string(b.size()));
  }
}

}  // namespace

Vector::Vector(std::size_t len, double fill) : data_(len, fill) {}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "Vector");
}

Vector Vector::from_values(std::vector<double> values) {
  require_finite(values, "Vector");
  Vector v;
  v.data_ = std::move(values);
  return v;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_values(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) {
    throw StructuralError("Matrix: " + std::to_string(values.size()) + " values for shape " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  require_finite(values, "Matrix");
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(values);
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

double sigmoid(double x) {
  // Branching keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
  return out;
}

Vector tanh(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

Vector softmax(const Vector& v) {
  if (v.empty()) return {};
  const double peak = *std::max_element(v.begin(), v.end());
  Vector out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - peak);
    total += out[i];
  }
  for (auto& x : out) x /= total;
  return out;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw StructuralError("matvec: matrix " + shape_string(m) + " with vector " +
                          len_string(v.size()));
  }
  Vector out(m.rows());
  kernel::matvec(m, v.span(), out.span(), false);
  return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) {
    throw StructuralError("matvec_transposed: matrix " + shape_string(m) + " with vector " +
                          len_string(v.size()));
  }
  Vector out(m.cols());
  kernel::matvec_transposed_add(m, v.span(), out.span());
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require_same_len(a, b, "hadamard");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vector add(const Vector& a, const Vector& b) {
  require_same_len(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector concat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw ParameterError("glorot_uniform: dimensions must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (auto& x : m.span()) x = rng.uniform(-bound, bound);
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

namespace kernel {

void matvec(const Matrix& m, std::span<const double> x, std::span<double> out, bool accumulate) {
  assert(x.size() == m.cols() && out.size() == m.rows());
  const std::size_t cols = m.cols();
  const double* w = m.data();
  for (std::size_t r = 0; r < m.rows(); ++r, w += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += w[c] * x[c];
    out[r] = accumulate ? out[r] + acc : acc;
  }
}

void matvec_transposed_add(const Matrix& m, std::span<const double> y, std::span<double> out) {
  assert(y.size() == m.rows() && out.size() == m.cols());
  const std::size_t cols = m.cols();
  const double* w = m.data();
  double* o = out.data();
  for (std::size_t r = 0; r < m.rows(); ++r, w += cols) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) o[c] += w[c] * yr;
  }
}

void outer_add(Matrix& m, std::span<const double> a, std::span<const double> b) {
  assert(a.size() == m.rows() && b.size() == m.cols());
  const std::size_t cols = m.cols();
  double* w = m.data();
  const double* bp = b.data();
  for (std::size_t r = 0; r < m.rows(); ++r, w += cols) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) w[c] += ar * bp[c];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace kernel
}  // namespace reqrnn
