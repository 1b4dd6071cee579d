// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/views.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace intentforge {

void ProjectionHead::validate() const {
  if (layers.empty()) throw ValidationError("projection head has no layers");
  std::size_t dim = input_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const AffineLayer& layer = layers[i];
    if (layer.weight.cols() != dim) {
      throw ValidationError("layer " + std::to_string(i) + " input dim mismatch");
    }
    if (layer.bias.size() != layer.weight.rows()) {
      throw ValidationError("layer " + std::to_string(i) + " bias size mismatch");
    }
    dim = layer.weight.rows();
  }
  if (dim != output_dim) throw ValidationError("final layer does not match output_dim");
  for (const auto& [id, w] : dataset_heads) {
    if (w.cols() != output_dim) {
      throw ValidationError("dataset head '" + id + "' column count != output_dim");
    }
  }
}

namespace {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix w(rows, cols);
  for (double& v : w.values()) v = (2.0 * rng.next_double() - 1.0) * bound;
  return w;
}

}  // namespace

ProjectionHead init_head(const std::string& view_id, std::size_t input_dim,
                         const std::vector<std::size_t>& hidden_dims, std::size_t output_dim,
                         Rng& rng) {
  ProjectionHead head;
  head.view_id = view_id;
  head.input_dim = input_dim;
  head.output_dim = output_dim;
  std::size_t dim = input_dim;
  for (const std::size_t h : hidden_dims) {
    head.layers.push_back({glorot_uniform(h, dim, rng), std::vector<double>(h, 0.0)});
    dim = h;
  }
  head.layers.push_back({glorot_uniform(output_dim, dim, rng), std::vector<double>(output_dim, 0.0)});
  head.validate();
  return head;
}

void add_dataset_head(ProjectionHead& head, const std::string& dataset_id, std::size_t num_labels,
                      Rng& rng) {
  head.dataset_heads[dataset_id] = glorot_uniform(num_labels, head.output_dim, rng);
}

Matrix head_forward(const ProjectionHead& head, const Matrix& x) {
  if (x.cols() != head.input_dim) {
    throw ValidationError("head_forward: input has " + std::to_string(x.cols()) +
                          " columns, head expects " + std::to_string(head.input_dim));
  }
  Matrix z = x;
  for (std::size_t li = 0; li < head.layers.size(); ++li) {
    const AffineLayer& layer = head.layers[li];
    const bool last = li + 1 == head.layers.size();
    Matrix next(z.rows(), layer.weight.rows());
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t o = 0; o < layer.weight.rows(); ++o) {
        const double a = dot(layer.weight.row(o), z.row(r)) + layer.bias[o];
        next.at(r, o) = last ? a : std::tanh(a);
      }
    }
    z = std::move(next);
  }
  return z;
}

Matrix MultiViewEmbedding::slice_view(std::size_t view_index) const {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < view_index; ++i) offset += view_dims[i];
  const std::size_t d = view_dims[view_index];
  Matrix out(h.rows(), d);
  for (std::size_t r = 0; r < h.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) out.at(r, c) = h.at(r, offset + c);
  }
  return out;
}

MultiViewEmbedding compose_views(const Matrix& z1, const Matrix& z2, const Matrix& z3) {
  MultiViewEmbedding mv;
  mv.h = hconcat({&z1, &z2, &z3});
  mv.h.check_finite("compose_views");
  mv.view_dims = {z1.cols(), z2.cols(), z3.cols()};
  mv.view_ids = {"GE", "MDB", "PGT"};
  return mv;
}

Matrix normalize_rows(const Matrix& x) {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const double norm = l2_norm(out.row(r));
    if (norm == 0.0) throw DomainError("normalize_rows: zero row " + std::to_string(r));
    for (double& v : out.row(r)) v /= norm;
  }
  return out;
}

namespace {

nlohmann::ordered_json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.values()}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("values").get<std::vector<double>>());
}

}  // namespace

void save_head_checkpoint(const ProjectionHead& head, const std::string& path) {
  nlohmann::ordered_json j;
  j["view_id"] = head.view_id;
  j["input_dim"] = head.input_dim;
  j["output_dim"] = head.output_dim;
  j["layers"] = nlohmann::ordered_json::array();
  for (const auto& layer : head.layers) {
    j["layers"].push_back({{"weight", matrix_to_json(layer.weight)}, {"bias", layer.bias}});
  }
  j["dataset_heads"] = nlohmann::ordered_json::object();
  for (const auto& [id, w] : head.dataset_heads) j["dataset_heads"][id] = matrix_to_json(w);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write head checkpoint: " + path);
  os << j.dump(2) << "\n";
}

ProjectionHead load_head_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open head checkpoint: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("head checkpoint is not valid JSON: " + std::string(e.what()));
  }
  ProjectionHead head;
  head.view_id = j.at("view_id").get<std::string>();
  head.input_dim = j.at("input_dim").get<std::size_t>();
  head.output_dim = j.at("output_dim").get<std::size_t>();
  for (const auto& layer : j.at("layers")) {
    head.layers.push_back(
        {matrix_from_json(layer.at("weight")), layer.at("bias").get<std::vector<double>>()});
  }
  if (j.contains("dataset_heads")) {
    for (const auto& [id, w] : j.at("dataset_heads").items()) {
      head.dataset_heads[id] = matrix_from_json(w);
    }
  }
  head.validate();
  return head;
}

}  // namespace intentforge
