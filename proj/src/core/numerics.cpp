// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"

namespace intentforge {

Matrix pairwise_metric(const Matrix& x, PairwiseMetric metric) {
  if (x.empty()) throw ValidationError("pairwise_metric: empty matrix");
  const std::size_t n = x.rows();
  Matrix out(n, n);
  if (metric == PairwiseMetric::kEuclidean) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = std::sqrt(squared_distance(x.row(i), x.row(j)));
        out.at(i, j) = d;
        out.at(j, i) = d;
      }
    }
  } else {
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
      norms[i] = l2_norm(x.row(i));
      if (norms[i] == 0.0) {
        throw DomainError("pairwise_metric: zero-norm row under cosine similarity");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.at(i, i) = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double s = dot(x.row(i), x.row(j)) / (norms[i] * norms[j]);
        out.at(i, j) = s;
        out.at(j, i) = s;
      }
    }
  }
  return out;
}

EigenResult symmetric_eigen(const Matrix& a, std::size_t k) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw ValidationError("symmetric_eigen: matrix not square");
  if (k < 1 || k > n) throw ValidationError("symmetric_eigen: k out of range");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(a.at(i, j) - a.at(j, i)) > 1e-10) {
        throw ValidationError("symmetric_eigen: input is not symmetric");
      }
    }
  }

  // Cyclic Jacobi: sweep all (p,q) pairs, rotating each off-diagonal entry to
  // zero; stop when the off-diagonal Frobenius norm drops below 1e-10 or
  // after 100 sweeps.
  Matrix m = a;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

  const auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * m.at(i, j) * m.at(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() >= 1e-10; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double mip = m.at(i, p);
          const double miq = m.at(i, q);
          m.at(i, p) = c * mip - s * miq;
          m.at(i, q) = s * mip + c * miq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double mpi = m.at(p, i);
          const double mqi = m.at(q, i);
          m.at(p, i) = c * mpi - s * mqi;
          m.at(q, i) = s * mpi + c * mqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v.at(i, p);
          const double viq = v.at(i, q);
          v.at(i, p) = c * vip - s * viq;
          v.at(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return m.at(i, i) < m.at(j, j); });

  EigenResult result;
  result.eigenvalues.reserve(k);
  result.eigenvectors = Matrix(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t idx = order[c];
    result.eigenvalues.push_back(m.at(idx, idx));
    for (std::size_t r = 0; r < n; ++r) result.eigenvectors.at(r, c) = v.at(r, idx);
  }
  return result;
}

double silhouette_score(const Matrix& x, const std::vector<int>& labels) {
  if (labels.size() != x.rows()) {
    throw ValidationError("silhouette_score: label count does not match rows");
  }
  const std::size_t n = x.rows();
  int max_label = -1;
  for (const int l : labels) max_label = std::max(max_label, l);
  std::vector<std::size_t> cluster_size(static_cast<std::size_t>(max_label) + 1, 0);
  for (const int l : labels) {
    if (l < 0) throw ValidationError("silhouette_score: negative label");
    ++cluster_size[static_cast<std::size_t>(l)];
  }
  std::size_t distinct = 0;
  for (const std::size_t s : cluster_size) distinct += (s > 0);
  if (distinct < 2) throw DomainError("silhouette_score: needs at least two distinct labels");

  const std::size_t num_clusters = cluster_size.size();
  double total = 0.0;
  std::vector<double> sum_to_cluster(num_clusters);
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = static_cast<std::size_t>(labels[i]);
    if (cluster_size[li] == 1) continue;  // singleton contributes 0
    std::fill(sum_to_cluster.begin(), sum_to_cluster.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum_to_cluster[static_cast<std::size_t>(labels[j])] +=
          std::sqrt(squared_distance(x.row(i), x.row(j)));
    }
    const double a = sum_to_cluster[li] / static_cast<double>(cluster_size[li] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < num_clusters; ++c) {
      if (c == li || cluster_size[c] == 0) continue;
      b = std::min(b, sum_to_cluster[c] / static_cast<double>(cluster_size[c]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& theta, double h) {
  if (h <= 0.0) throw ValidationError("finite_diff_gradient: h must be positive");
  std::vector<double> grad(theta.size());
  std::vector<double> probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = f(probe);
    probe[i] = theta[i] - h;
    const double down = f(probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace intentforge
