// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_TESTS_HELPERS_HPP
#define INTENTFORGE_TESTS_HELPERS_HPP

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace testutil {

inline intentforge::Matrix random_matrix(std::size_t rows, std::size_t cols, intentforge::Rng& rng,
                                         double scale = 1.0) {
  intentforge::Matrix m(rows, cols);
  for (auto& v : m.values()) v = scale * (2.0 * rng.next_double() - 1.0);
  return m;
}

// Scratch directory under the system temp root, unique per call.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::size_t counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("intentforge_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Exhaustive minimum over complete injective assignments of a square matrix.
inline double brute_force_square_min(const intentforge::Matrix& cost) {
  std::vector<std::size_t> perm(cost.rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < perm.size(); ++r) total += cost.at(r, perm[r]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---- Independent metric oracle -------------------------------------------
// Re-derives ACC/NMI/ARI/macro-F1 from the contingency table using bitmask
// dynamic programming for the alignment (instead of augmenting paths), with
// the same deterministic tie-break: rows in ascending predicted-label order
// take the smallest reference column that still allows an optimal total.

struct OracleMetrics {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<int, int> mapping;  // predicted -> reference (one-to-one mode)
};

namespace detail {

// Max total matched count over injective partial maps of pred rows
// [row, P) to unused ref columns; unmatched rows contribute 0.
inline double best_completion(const std::vector<std::vector<double>>& counts, std::size_t row,
                              unsigned used_mask, std::vector<std::vector<double>>& memo,
                              std::vector<std::vector<char>>& seen) {
  const std::size_t p = counts.size();
  const std::size_t r = counts.empty() ? 0 : counts[0].size();
  if (row == p) return 0.0;
  if (seen[row][used_mask]) return memo[row][used_mask];
  double best = best_completion(counts, row + 1, used_mask, memo, seen);  // leave row unmatched
  for (std::size_t j = 0; j < r; ++j) {
    if (used_mask & (1u << j)) continue;
    best = std::max(best, counts[row][j] + best_completion(counts, row + 1, used_mask | (1u << j),
                                                           memo, seen));
  }
  seen[row][used_mask] = 1;
  memo[row][used_mask] = best;
  return best;
}

}  // namespace detail

inline OracleMetrics oracle_metrics(const std::vector<int>& pred, const std::vector<int>& ref) {
  const double n = static_cast<double>(pred.size());
  std::vector<int> pv(pred.begin(), pred.end()), rv(ref.begin(), ref.end());
  std::sort(pv.begin(), pv.end());
  pv.erase(std::unique(pv.begin(), pv.end()), pv.end());
  std::sort(rv.begin(), rv.end());
  rv.erase(std::unique(rv.begin(), rv.end()), rv.end());
  const std::size_t p = pv.size(), r = rv.size();

  std::vector<std::vector<double>> counts(p, std::vector<double>(r, 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t pi = static_cast<std::size_t>(
        std::lower_bound(pv.begin(), pv.end(), pred[i]) - pv.begin());
    const std::size_t ri = static_cast<std::size_t>(
        std::lower_bound(rv.begin(), rv.end(), ref[i]) - rv.begin());
    counts[pi][ri] += 1.0;
  }

  OracleMetrics out;

  // One-to-one alignment by DP, smallest-column tie-break. A predicted row is
  // left unmatched only when no real column preserves the optimum, mirroring
  // the dummy-padding convention (dummy columns sort after real ones at the
  // padded maximum, which is zero for negated counts).
  {
    std::vector<std::vector<double>> memo(p + 1, std::vector<double>(1u << r, 0.0));
    std::vector<std::vector<char>> seen(p + 1, std::vector<char>(1u << r, 0));
    const double opt = detail::best_completion(counts, 0, 0, memo, seen);
    unsigned used = 0;
    double fixed = 0.0;
    double matched_total = 0.0;
    std::size_t free_real_cols = r;
    std::size_t dummies_left = p > r ? p - r : 0;
    for (std::size_t row = 0; row < p; ++row) {
      bool assigned = false;
      for (std::size_t j = 0; j < r && !assigned; ++j) {
        if (used & (1u << j)) continue;
        // Completions are over rows below this one with column j consumed.
        std::vector<std::vector<double>> memo2(p + 1, std::vector<double>(1u << r, 0.0));
        std::vector<std::vector<char>> seen2(p + 1, std::vector<char>(1u << r, 0));
        const double rest =
            detail::best_completion(counts, row + 1, used | (1u << j), memo2, seen2);
        if (fixed + counts[row][j] + rest >= opt - 1e-9) {
          used |= (1u << j);
          fixed += counts[row][j];
          matched_total += counts[row][j];
          out.mapping[pv[row]] = rv[j];
          --free_real_cols;
          assigned = true;
        }
      }
      if (!assigned) {
        // Would take a dummy column; feasible only while dummies remain.
        if (dummies_left > 0) {
          --dummies_left;
        } else {
          // Forced onto some real column even at no gain: smallest free one.
          for (std::size_t j = 0; j < r; ++j) {
            if (!(used & (1u << j))) {
              used |= (1u << j);
              out.mapping[pv[row]] = rv[j];
              --free_real_cols;
              break;
            }
          }
        }
      }
      (void)free_real_cols;
    }
    out.acc = matched_total / n;
  }

  std::vector<double> pm(p, 0.0), rm(r, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      pm[i] += counts[i][j];
      rm[j] += counts[i][j];
    }
  }

  double hp = 0.0, hr = 0.0, mi = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    if (pm[i] > 0) hp -= pm[i] / n * std::log(pm[i] / n);
  }
  for (std::size_t j = 0; j < r; ++j) {
    if (rm[j] > 0) hr -= rm[j] / n * std::log(rm[j] / n);
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (counts[i][j] > 0) {
        mi += counts[i][j] / n * std::log(n * counts[i][j] / (pm[i] * rm[j]));
      }
    }
  }
  out.nmi = (hp + hr) == 0.0 ? 1.0 : 2.0 * mi / (hp + hr);
  out.nmi = std::clamp(out.nmi, 0.0, 1.0);

  const auto choose2 = [](double m) { return m * (m - 1.0) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    sum_a += choose2(pm[i]);
    for (std::size_t j = 0; j < r; ++j) sum_ij += choose2(counts[i][j]);
  }
  for (std::size_t j = 0; j < r; ++j) sum_b += choose2(rm[j]);
  const double expected = sum_a * sum_b / choose2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  out.ari = max_index == expected ? 1.0 : (sum_ij - expected) / (max_index - expected);

  // Macro P/R/F1 over reference labels under the one-to-one mapping.
  std::vector<double> tp(r, 0.0), pred_as(r, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const auto it = out.mapping.find(pv[i]);
    if (it == out.mapping.end()) continue;
    const std::size_t j = static_cast<std::size_t>(
        std::lower_bound(rv.begin(), rv.end(), it->second) - rv.begin());
    pred_as[j] += pm[i];
    tp[j] += counts[i][j];
  }
  for (std::size_t j = 0; j < r; ++j) {
    const double prec = pred_as[j] > 0 ? tp[j] / pred_as[j] : 0.0;
    const double rec = rm[j] > 0 ? tp[j] / rm[j] : 0.0;
    out.precision += prec;
    out.recall += rec;
    out.f1 += (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  out.precision /= static_cast<double>(r);
  out.recall /= static_cast<double>(r);
  out.f1 /= static_cast<double>(r);
  return out;
}

}  // namespace testutil

#endif  // INTENTFORGE_TESTS_HELPERS_HPP
