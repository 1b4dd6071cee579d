// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_NUMERICS_HPP
#define INTENTFORGE_CORE_NUMERICS_HPP

#include <functional>
#include <vector>

#include "core/matrix.hpp"

namespace intentforge {

enum class PairwiseMetric { kEuclidean, kCosineSimilarity };

// Symmetric n x n matrix of distances (euclidean) or similarities (cosine).
// Cosine requires every row to have a non-zero norm.
Matrix pairwise_metric(const Matrix& x, PairwiseMetric metric);

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // one unit-norm column per eigenvalue
};

// k smallest eigenpairs of a symmetric matrix, cyclic Jacobi rotations.
// Input must be symmetric within 1e-10.
EigenResult symmetric_eigen(const Matrix& a, std::size_t k);

// Mean silhouette over all points, euclidean distances. Requires at least two
// distinct labels; singleton clusters contribute 0; the a=b=0 case scores 0.
double silhouette_score(const Matrix& x, const std::vector<int>& labels);

// Central-difference gradient, the test oracle for all analytic gradients.
std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& theta, double h);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_NUMERICS_HPP
