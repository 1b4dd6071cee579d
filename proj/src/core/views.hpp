// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_VIEWS_HPP
#define INTENTFORGE_CORE_VIEWS_HPP

#include <map>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace intentforge {

struct AffineLayer {
  Matrix weight;             // output_dim x input_dim
  std::vector<double> bias;  // output_dim
};

// Trainable affine stack mapping base embeddings to a view space: tanh between
// layers, final layer linear. dataset_heads hold the per-dataset normalized
// classification weights (one row per intent label, registry label order);
// they exist only for training.
struct ProjectionHead {
  std::string view_id;  // "GE", "MDB" or "PGT"
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<AffineLayer> layers;
  std::map<std::string, Matrix> dataset_heads;  // dataset_id -> L^k x output_dim

  void validate() const;
};

// Glorot-uniform weights, zero biases. hidden_dims excludes input and output.
ProjectionHead init_head(const std::string& view_id, std::size_t input_dim,
                         const std::vector<std::size_t>& hidden_dims, std::size_t output_dim,
                         Rng& rng);

// Adds a classification head of shape labels x output_dim for a dataset.
void add_dataset_head(ProjectionHead& head, const std::string& dataset_id, std::size_t num_labels,
                      Rng& rng);

Matrix head_forward(const ProjectionHead& head, const Matrix& x);

struct MultiViewEmbedding {
  Matrix h;
  std::vector<std::size_t> view_dims;  // d1, d2, d3
  std::vector<std::string> view_ids;   // "GE", "MDB", "PGT"

  // Recovers one view's column block.
  Matrix slice_view(std::size_t view_index) const;
};

// Row-wise Concat{Z1, Z2, Z3} in the fixed GE, MDB, PGT order; a disabled view
// is passed as a zero-column matrix.
MultiViewEmbedding compose_views(const Matrix& z1, const Matrix& z2, const Matrix& z3);

// Every row scaled to unit L2 norm; zero rows are a domain error.
Matrix normalize_rows(const Matrix& x);

void save_head_checkpoint(const ProjectionHead& head, const std::string& path);
ProjectionHead load_head_checkpoint(const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_VIEWS_HPP
