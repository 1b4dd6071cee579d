// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/errors.hpp"

namespace intentforge {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ValidationError("matrix value count does not match rows*cols");
  }
}

void Matrix::check_finite(const std::string& context) const {
  for (const double v : values_) {
    if (!std::isfinite(v)) {
      throw ValidationError(context + ": matrix contains a non-finite value");
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Matrix hconcat(const std::vector<const Matrix*>& blocks) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (const Matrix* b : blocks) {
    if (b->cols() == 0) continue;
    if (rows == 0) {
      rows = b->rows();
    } else if (b->rows() != rows) {
      throw ValidationError("hconcat: row-count mismatch between blocks");
    }
    cols += b->cols();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const Matrix* b : blocks) {
    if (b->cols() == 0) continue;
    for (std::size_t r = 0; r < rows; ++r) {
      std::memcpy(&out.at(r, offset), b->row(r).data(), b->cols() * sizeof(double));
    }
    offset += b->cols();
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'I', 'F', 'M', 'X'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace

void save_matrix(const Matrix& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open matrix file for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, static_cast<std::uint32_t>(m.rows()));
  write_u32(os, static_cast<std::uint32_t>(m.cols()));
  // float64 payload is written as-is; this toolkit targets little-endian hosts.
  os.write(reinterpret_cast<const char*>(m.values().data()),
           static_cast<std::streamsize>(m.values().size() * sizeof(double)));
  if (!os) throw ConfigError("failed writing matrix file: " + path);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open matrix file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ValidationError("not an IFMX matrix file: " + path);
  }
  const std::uint32_t rows = read_u32(is);
  const std::uint32_t cols = read_u32(is);
  if (!is) throw ValidationError("truncated matrix header: " + path);
  std::vector<double> values(static_cast<std::size_t>(rows) * cols);
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw ValidationError("truncated matrix payload: " + path);
  return Matrix(rows, cols, std::move(values));
}

}  // namespace intentforge
