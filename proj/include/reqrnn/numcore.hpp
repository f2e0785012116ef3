// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors
//
// Dense vector/matrix kernel used by the recurrent cells. Everything is
// 64-bit floating point and row-major.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace reqrnn {

class Rng;

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t len, double fill = 0.0);
  Vector(std::initializer_list<double> values);

  /// Takes ownership of external data; rejects NaN/Inf.
  static Vector from_values(std::vector<double> values);

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  /// Row-major external data; rejects NaN/Inf and size mismatch.
  static Matrix from_values(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::string shape_string(const Matrix& m);

// Elementwise activations.
double sigmoid(double x);
Vector sigmoid(const Vector& v);
Vector tanh(const Vector& v);
/// Max-subtracted softmax.
Vector softmax(const Vector& v);

Vector matvec(const Matrix& m, const Vector& v);
/// m^T v
Vector matvec_transposed(const Matrix& m, const Vector& v);
Vector hadamard(const Vector& a, const Vector& b);
Vector add(const Vector& a, const Vector& b);
/// [a; b], a first.
Vector concat(const Vector& a, const Vector& b);

/// Uniform on +-sqrt(6 / (rows + cols)).
Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

double dot(std::span<const double> a, std::span<const double> b);

namespace kernel {

// Span kernels for the hot loops. No shape checks beyond debug asserts;
// callers own the sizing.

/// out[r] (+)= sum_c m(r, c) * x[c]
void matvec(const Matrix& m, std::span<const double> x, std::span<double> out, bool accumulate);
/// out[c] += sum_r m(r, c) * y[r]
void matvec_transposed_add(const Matrix& m, std::span<const double> y, std::span<double> out);
/// m(r, c) += a[r] * b[c]
void outer_add(Matrix& m, std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace kernel

}  // namespace reqrnn
