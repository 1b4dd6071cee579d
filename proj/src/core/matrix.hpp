// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_MATRIX_HPP
#define INTENTFORGE_CORE_MATRIX_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace intentforge {

// Dense row-major matrix of 64-bit reals. All hidden-representation and
// distance matrices in the toolkit live in this type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Throws ValidationError if any value is non-finite.
  void check_finite(const std::string& context) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Stacks matrices left to right; empty (zero-column) blocks are skipped.
Matrix hconcat(const std::vector<const Matrix*>& blocks);

// Binary matrix file: magic "IFMX", u32 rows, u32 cols (little endian),
// then row-major float64 payload.
void save_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_MATRIX_HPP
