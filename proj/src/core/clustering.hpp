// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_CLUSTERING_HPP
#define INTENTFORGE_CORE_CLUSTERING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace intentforge {

enum class ClusteringMethod { kKmeans, kSpectral };
enum class LaplacianVariant { kNormalized, kUnnormalized };

struct ClusterAssignment {
  std::vector<int> labels;  // per-row cluster id in [0, K)
  Matrix centroids;         // K x d; spectral reports centroids in embedding space
  double inertia = 0.0;
  std::size_t k = 0;
  ClusteringMethod method = ClusteringMethod::kKmeans;
};

// Best of n_init restarts by inertia; each restart seeds with k-means++ and
// runs Lloyd iterations to an assignment fixpoint (or max_iter). Empty
// clusters are repaired with the farthest point of the largest cluster.
ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::size_t n_init, std::size_t max_iter,
                         Rng& rng);

// Symmetrized kNN affinity (unit weights), graph Laplacian, K smallest
// eigenvectors, row-normalized spectral embedding, then kmeans on it.
ClusterAssignment spectral(const Matrix& x, std::size_t k, std::size_t n_neighbors,
                           std::size_t n_init, Rng& rng,
                           LaplacianVariant variant = LaplacianVariant::kNormalized);

struct KSearchConfig {
  std::size_t k_min = 5;
  std::size_t k_max = 50;
  std::size_t trials = 46;  // >= range size means exhaustive sweep
  std::uint64_t rng_seed = 0;
};

struct KSearchResult {
  std::size_t k_best = 0;
  std::vector<std::pair<std::size_t, double>> score_table;  // (K, silhouette)
};

// Draws `trials` K values uniformly without replacement from [k_min, k_max]
// (full sweep when trials covers the range), clusters at each K and keeps the
// silhouette maximizer; ties go to the smaller K.
KSearchResult estimate_k(const Matrix& x, const KSearchConfig& cfg, ClusteringMethod method,
                         std::size_t n_neighbors, std::size_t n_init, Rng& rng);

// JSONL {"utterance_id": ..., "cluster_id": ...}, one line per row.
void save_assignment_jsonl(const ClusterAssignment& assignment,
                           const std::vector<std::string>& utterance_ids, const std::string& path);

// CSV with a "K,silhouette" header.
void save_score_table_csv(const KSearchResult& result, const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_CLUSTERING_HPP
