// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "intentforge.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/clustering.hpp"
#include "core/commands.hpp"
#include "core/errors.hpp"
#include "core/matrix.hpp"
#include "core/metrics.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"

namespace {

thread_local std::string g_last_error;

ifx_status set_error(const std::string& message, ifx_status code) {
  g_last_error = message;
  return code;
}

// Every exported function funnels its body through here so exceptions never
// cross the C boundary.
template <typename Fn>
ifx_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return IFX_OK;
  } catch (const intentforge::ConfigError& e) {
    return set_error(e.what(), IFX_ERR_CONFIG);
  } catch (const intentforge::ValidationError& e) {
    return set_error(e.what(), IFX_ERR_VALIDATION);
  } catch (const intentforge::DomainError& e) {
    return set_error(e.what(), IFX_ERR_VALIDATION);
  } catch (const std::exception& e) {
    return set_error(e.what(), IFX_ERR_VALIDATION);
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ifx_status run_command(std::string (*command)(const std::string&, std::uint64_t),
                       const char* config_json, uint64_t seed, char** summary_json) {
  return guarded([&] {
    if (config_json == nullptr) throw intentforge::ConfigError("config_json is null");
    const std::string summary = command(std::string(config_json), seed);
    if (summary_json != nullptr) *summary_json = copy_string(summary);
  });
}

const intentforge::Matrix& unwrap(const ifx_matrix* m) {
  if (m == nullptr) throw intentforge::ValidationError("matrix handle is null");
  return *reinterpret_cast<const intentforge::Matrix*>(m);
}

}  // namespace

extern "C" {

const char* ifx_last_error(void) { return g_last_error.c_str(); }

void ifx_string_free(char* s) { delete[] s; }

ifx_status ifx_matrix_create(size_t rows, size_t cols, const double* row_major,
                             ifx_matrix** out) {
  return guarded([&] {
    if (out == nullptr) throw intentforge::ValidationError("out is null");
    if (rows > 0 && cols > 0 && row_major == nullptr) {
      throw intentforge::ValidationError("row_major is null for a non-empty matrix");
    }
    auto* m = new intentforge::Matrix(rows, cols);
    if (rows > 0 && cols > 0) {
      std::memcpy(m->values().data(), row_major, rows * cols * sizeof(double));
    }
    *out = reinterpret_cast<ifx_matrix*>(m);
  });
}

void ifx_matrix_free(ifx_matrix* m) { delete reinterpret_cast<intentforge::Matrix*>(m); }

size_t ifx_matrix_rows(const ifx_matrix* m) {
  return m == nullptr ? 0 : reinterpret_cast<const intentforge::Matrix*>(m)->rows();
}

size_t ifx_matrix_cols(const ifx_matrix* m) {
  return m == nullptr ? 0 : reinterpret_cast<const intentforge::Matrix*>(m)->cols();
}

ifx_status ifx_matrix_copy_data(const ifx_matrix* m, double* out) {
  return guarded([&] {
    const auto& mat = unwrap(m);
    if (out == nullptr) throw intentforge::ValidationError("out is null");
    std::memcpy(out, mat.values().data(), mat.values().size() * sizeof(double));
  });
}

ifx_status ifx_matrix_save(const ifx_matrix* m, const char* path) {
  return guarded([&] {
    if (path == nullptr) throw intentforge::ConfigError("path is null");
    intentforge::save_matrix(unwrap(m), path);
  });
}

ifx_status ifx_matrix_load(const char* path, ifx_matrix** out) {
  return guarded([&] {
    if (path == nullptr) throw intentforge::ConfigError("path is null");
    if (out == nullptr) throw intentforge::ValidationError("out is null");
    *out = reinterpret_cast<ifx_matrix*>(new intentforge::Matrix(intentforge::load_matrix(path)));
  });
}

ifx_status ifx_kmeans(const ifx_matrix* x, size_t k, size_t n_init, size_t max_iter,
                      uint64_t seed, int32_t* labels, ifx_matrix** centroids) {
  return guarded([&] {
    const auto& mat = unwrap(x);
    if (labels == nullptr) throw intentforge::ValidationError("labels is null");
    intentforge::Rng rng(seed);
    const auto assignment = intentforge::kmeans(mat, k, n_init, max_iter, rng);
    for (size_t i = 0; i < assignment.labels.size(); ++i) {
      labels[i] = assignment.labels[i];
    }
    if (centroids != nullptr) {
      *centroids = reinterpret_cast<ifx_matrix*>(new intentforge::Matrix(assignment.centroids));
    }
  });
}

ifx_status ifx_spectral(const ifx_matrix* x, size_t k, size_t n_neighbors, size_t n_init,
                        uint64_t seed, int32_t* labels) {
  return guarded([&] {
    const auto& mat = unwrap(x);
    if (labels == nullptr) throw intentforge::ValidationError("labels is null");
    intentforge::Rng rng(seed);
    const auto assignment = intentforge::spectral(mat, k, n_neighbors, n_init, rng);
    for (size_t i = 0; i < assignment.labels.size(); ++i) {
      labels[i] = assignment.labels[i];
    }
  });
}

ifx_status ifx_silhouette(const ifx_matrix* x, const int32_t* labels, double* out) {
  return guarded([&] {
    const auto& mat = unwrap(x);
    if (labels == nullptr || out == nullptr) {
      throw intentforge::ValidationError("labels/out is null");
    }
    std::vector<int> v(labels, labels + mat.rows());
    *out = intentforge::silhouette_score(mat, v);
  });
}

ifx_status ifx_hungarian(const ifx_matrix* cost, int32_t* assignment, double* total_cost) {
  return guarded([&] {
    const auto& mat = unwrap(cost);
    if (assignment == nullptr) throw intentforge::ValidationError("assignment is null");
    const auto result = intentforge::hungarian(mat);
    for (size_t i = 0; i < result.assignment.size(); ++i) assignment[i] = result.assignment[i];
    if (total_cost != nullptr) *total_cost = result.total_cost;
  });
}

ifx_status ifx_compute_metrics(const int32_t* pred, const int32_t* ref, size_t n,
                               int32_t mode, char** report_json) {
  return guarded([&] {
    if (pred == nullptr || ref == nullptr) {
      throw intentforge::ValidationError("pred/ref is null");
    }
    if (mode != 0 && mode != 1) {
      throw intentforge::ValidationError("mode must be 0 (one-to-one) or 1 (overlapping)");
    }
    const std::vector<int> p(pred, pred + n);
    const std::vector<int> r(ref, ref + n);
    const auto report = intentforge::compute_metrics(
        p, r,
        mode == 0 ? intentforge::AlignmentMode::kOneToOne
                  : intentforge::AlignmentMode::kOverlapping);
    if (report_json != nullptr) *report_json = copy_string(report.to_json());
  });
}

ifx_status ifx_gen_fixture(const char* config_json, uint64_t seed, char** summary_json) {
  return run_command(intentforge::run_gen_fixture, config_json, seed, summary_json);
}

ifx_status ifx_extract(const char* config_json, uint64_t seed, char** summary_json) {
  return run_command(intentforge::run_extract, config_json, seed, summary_json);
}

ifx_status ifx_train_mdb(const char* config_json, uint64_t seed, char** summary_json) {
  return run_command(intentforge::run_train_mdb, config_json, seed, summary_json);
}

ifx_status ifx_train_pgt(const char* config_json, uint64_t seed, char** summary_json) {
  return run_command(intentforge::run_train_pgt, config_json, seed, summary_json);
}

ifx_status ifx_induce(const char* config_json, uint64_t seed, char** summary_json) {
  return run_command(intentforge::run_induce, config_json, seed, summary_json);
}

ifx_status ifx_evaluate(const char* config_json, uint64_t seed, char** summary_json) {
  return run_command(intentforge::run_evaluate, config_json, seed, summary_json);
}

}  // extern "C"
