// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_METRICS_HPP
#define INTENTFORGE_CORE_METRICS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace intentforge {

struct HungarianResult {
  // assignment[r] = assigned column for row r, or -1 when unmatched
  // (rectangular inputs leave |rows-cols| rows or columns unmatched).
  std::vector<int> assignment;
  double total_cost = 0.0;
};

// Minimum-total-cost injective assignment of min(rows, cols) pairs,
// O(n^3) augmenting-path core with dummy padding for rectangular inputs.
// Ties are broken toward the lexicographically smallest assignment.
HungarianResult hungarian(const Matrix& cost);

enum class AlignmentMode { kOneToOne, kOverlapping };

struct AlignmentResult {
  AlignmentMode mode = AlignmentMode::kOneToOne;
  std::map<int, int> mapping;  // predicted label -> reference label
  std::set<int> unmatched_predicted;
};

// one_to_one: Hungarian on negated contingency counts (injective, partial when
// predicted labels outnumber reference labels). overlapping: each predicted
// label independently maps to its majority reference label.
AlignmentResult align_labels(const std::vector<int>& pred, const std::vector<int>& ref,
                             AlignmentMode mode);

struct MetricsReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;      // clamped to [0, 1] for display
  double ari_raw = 0.0;  // standard adjusted Rand, may be slightly negative
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  AlignmentResult alignment;
  Matrix contingency;  // predicted x reference counts
  std::vector<int> pred_labels;
  std::vector<int> ref_labels;

  std::string to_json() const;
};

// ACC via the chosen alignment, NMI with natural-log entropies, adjusted Rand
// on the contingency table, and macro P/R/F1 over reference labels (points in
// unmatched predicted clusters count as errors).
MetricsReport compute_metrics(const std::vector<int>& pred, const std::vector<int>& ref,
                              AlignmentMode mode);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_METRICS_HPP
