// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/numerics.hpp"

namespace intentforge {

namespace {

// Nearest centroid, ties toward the smaller index.
std::size_t nearest_centroid(std::span<const double> point, const Matrix& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(point, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Matrix kmeanspp_seed(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centroids(k, x.cols());
  std::vector<char> chosen(n, 0);

  std::size_t first = static_cast<std::size_t>(rng.next_below(n));
  chosen[first] = 1;
  std::copy(x.row(first).begin(), x.row(first).end(), centroids.row(0).begin());

  std::vector<double> min_dist(n);
  for (std::size_t i = 0; i < n; ++i) min_dist[i] = squared_distance(x.row(i), centroids.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = std::accumulate(min_dist.begin(), min_dist.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.next_double() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += min_dist[i];
        if (acc >= target && !chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    if (pick == n) {
      // All remaining mass is on already-chosen (duplicate) points; take the
      // first unchosen index.
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = 1;
    std::copy(x.row(pick).begin(), x.row(pick).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], squared_distance(x.row(i), centroids.row(c)));
    }
  }
  return centroids;
}

ClusterAssignment lloyd_restart(const Matrix& x, std::size_t k, std::size_t max_iter, Rng& rng) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Matrix centroids = kmeanspp_seed(x, k, rng);
  std::vector<int> labels(n, -1);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int l = static_cast<int>(nearest_centroid(x.row(i), centroids));
      if (l != labels[i]) {
        labels[i] = l;
        changed = true;
      }
    }

    // Empty-cluster repair: hand the farthest point of the largest cluster to
    // each empty cluster.
    std::vector<std::size_t> sizes(k, 0);
    for (const int l : labels) ++sizes[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      const std::size_t largest = static_cast<std::size_t>(
          std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(labels[i]) != largest) continue;
        const double dist = squared_distance(x.row(i), centroids.row(largest));
        if (dist > far_d) {
          far_d = dist;
          farthest = i;
        }
      }
      labels[farthest] = static_cast<int>(c);
      --sizes[largest];
      ++sizes[c];
      changed = true;
    }

    for (std::size_t c = 0; c < k; ++c) {
      std::fill(centroids.row(c).begin(), centroids.row(c).end(), 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) += x.at(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < d; ++j) centroids.at(c, j) /= static_cast<double>(sizes[c]);
    }

    if (!changed) break;
  }

  ClusterAssignment result;
  result.labels = std::move(labels);
  result.centroids = std::move(centroids);
  result.k = k;
  result.method = ClusteringMethod::kKmeans;
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia += squared_distance(
        x.row(i), result.centroids.row(static_cast<std::size_t>(result.labels[i])));
  }
  return result;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::size_t n_init, std::size_t max_iter,
                         Rng& rng) {
  if (x.empty()) throw ValidationError("kmeans: empty input");
  if (k < 1 || k > x.rows()) throw ValidationError("kmeans: K out of range");
  if (n_init < 1) throw ValidationError("kmeans: n_init must be at least 1");

  ClusterAssignment best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t restart = 0; restart < n_init; ++restart) {
    ClusterAssignment candidate = lloyd_restart(x, k, max_iter, rng);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

ClusterAssignment spectral(const Matrix& x, std::size_t k, std::size_t n_neighbors,
                           std::size_t n_init, Rng& rng, LaplacianVariant variant) {
  const std::size_t n = x.rows();
  if (x.empty()) throw ValidationError("spectral: empty input");
  if (k < 1 || k > n) throw ValidationError("spectral: K out of range");
  if (n_neighbors < 1 || n_neighbors >= n) {
    throw ValidationError("spectral: n_neighbors must be in [1, n)");
  }

  // Symmetrized kNN adjacency: an edge exists if either endpoint lists the
  // other among its n_neighbors nearest; all edges weigh 1.
  Matrix adjacency(n, n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(n);
    for (std::size_t j = 0; j < n; ++j) dist[j] = squared_distance(x.row(i), x.row(j));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });
    std::size_t taken = 0;
    for (const std::size_t j : order) {
      if (j == i) continue;
      adjacency.at(i, j) = 1.0;
      adjacency.at(j, i) = 1.0;
      if (++taken == n_neighbors) break;
    }
  }

  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) degree[i] += adjacency.at(i, j);
  }

  Matrix laplacian(n, n);
  if (variant == LaplacianVariant::kNormalized) {
    std::vector<double> inv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] > 0.0) {
        inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
      } else {
        IF_LOG_ERROR("spectral: isolated vertex " << i << " (degree 0)");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      laplacian.at(i, i) = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (adjacency.at(i, j) > 0.0) {
          laplacian.at(i, j) -= inv_sqrt[i] * adjacency.at(i, j) * inv_sqrt[j];
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      laplacian.at(i, i) = degree[i];
      for (std::size_t j = 0; j < n; ++j) laplacian.at(i, j) -= adjacency.at(i, j);
    }
  }

  const EigenResult eigen = symmetric_eigen(laplacian, k);
  Matrix embedding = eigen.eigenvectors;
  for (std::size_t r = 0; r < n; ++r) {
    const double norm = l2_norm(embedding.row(r));
    if (norm > 0.0) {
      for (double& v : embedding.row(r)) v /= norm;
    }
  }

  ClusterAssignment result = kmeans(embedding, k, n_init, 300, rng);
  result.method = ClusteringMethod::kSpectral;
  return result;
}

KSearchResult estimate_k(const Matrix& x, const KSearchConfig& cfg, ClusteringMethod method,
                         std::size_t n_neighbors, std::size_t n_init, Rng& rng) {
  const std::size_t n = x.rows();
  if (n <= cfg.k_min) throw ValidationError("estimate_k: too few rows for k_min");
  if (cfg.k_min < 2 || cfg.k_min > cfg.k_max || cfg.k_max > n - 1) {
    throw ValidationError("estimate_k: invalid K range");
  }
  if (cfg.trials < 1) throw ValidationError("estimate_k: trials must be at least 1");

  std::vector<std::size_t> candidates;
  const std::size_t range = cfg.k_max - cfg.k_min + 1;
  if (cfg.trials >= range) {
    for (std::size_t k = cfg.k_min; k <= cfg.k_max; ++k) candidates.push_back(k);
  } else {
    std::vector<std::size_t> pool(range);
    std::iota(pool.begin(), pool.end(), cfg.k_min);
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    candidates.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cfg.trials));
    std::sort(candidates.begin(), candidates.end());
  }

  KSearchResult result;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const std::size_t k : candidates) {
    const ClusterAssignment assignment =
        method == ClusteringMethod::kKmeans ? kmeans(x, k, n_init, 300, rng)
                                            : spectral(x, k, n_neighbors, n_init, rng);
    const double score = silhouette_score(x, assignment.labels);
    result.score_table.emplace_back(k, score);
    if (score > best_score) {  // ascending sweep, strict > keeps the smaller K on ties
      best_score = score;
      result.k_best = k;
    }
    IF_LOG_DEBUG("estimate_k: K=" << k << " silhouette=" << score);
  }
  return result;
}

void save_assignment_jsonl(const ClusterAssignment& assignment,
                           const std::vector<std::string>& utterance_ids, const std::string& path) {
  if (utterance_ids.size() != assignment.labels.size()) {
    throw ValidationError("save_assignment_jsonl: id count does not match labels");
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write assignment file: " + path);
  for (std::size_t i = 0; i < utterance_ids.size(); ++i) {
    nlohmann::ordered_json obj;
    obj["utterance_id"] = utterance_ids[i];
    obj["cluster_id"] = assignment.labels[i];
    os << obj.dump() << "\n";
  }
}

void save_score_table_csv(const KSearchResult& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write score table: " + path);
  os << "K,silhouette\n";
  for (const auto& [k, score] : result.score_table) {
    os << k << "," << nlohmann::json(score).dump() << "\n";
  }
}

}  // namespace intentforge
