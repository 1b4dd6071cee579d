// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "core/errors.hpp"

namespace intentforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jonker-Volgenant style shortest augmenting path assignment on a square
// matrix; returns the minimal total cost and row -> col mapping.
struct SquareAssignment {
  double total = 0.0;
  std::vector<int> row_to_col;
};

SquareAssignment assign_min_cost(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareAssignment result;
  result.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) result.row_to_col[p[j] - 1] = j - 1;
  }
  for (int r = 0; r < n; ++r) result.total += cost[r][result.row_to_col[r]];
  return result;
}

}  // namespace

HungarianResult hungarian(const Matrix& cost) {
  if (cost.empty()) throw ValidationError("hungarian: empty cost matrix");
  cost.check_finite("hungarian");
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  const std::size_t n = std::max(rows, cols);

  double pad = 0.0;
  for (const double v : cost.values()) pad = std::max(pad, v);

  // Dummy rows/cols at the pad value make the matrix square; every full
  // assignment carries the same number of dummy pairs, so the optimum over
  // real pairs is unchanged.
  std::vector<std::vector<double>> padded(n, std::vector<double>(n, pad));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) padded[r][c] = cost.at(r, c);
  }

  const double opt = assign_min_cost(padded).total;
  const double tol = 1e-9 * (1.0 + std::fabs(opt));

  // Lexicographic tie-break: fix each real row in turn to the smallest column
  // that still admits an optimal completion, re-solving the remainder.
  std::vector<char> col_taken(n, 0);
  std::vector<int> assignment(rows, -1);
  double fixed_cost = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (col_taken[c]) continue;
      std::vector<std::size_t> free_cols;
      for (std::size_t j = 0; j < n; ++j) {
        if (!col_taken[j] && j != c) free_cols.push_back(j);
      }
      double subtotal = 0.0;
      if (!free_cols.empty()) {
        std::vector<std::vector<double>> sub(free_cols.size(),
                                             std::vector<double>(free_cols.size()));
        for (std::size_t i = 0; i < free_cols.size(); ++i) {
          for (std::size_t j = 0; j < free_cols.size(); ++j) {
            sub[i][j] = padded[r + 1 + i][free_cols[j]];
          }
        }
        subtotal = assign_min_cost(sub).total;
      }
      if (fixed_cost + padded[r][c] + subtotal <= opt + tol) {
        col_taken[c] = 1;
        fixed_cost += padded[r][c];
        if (c < cols) assignment[r] = static_cast<int>(c);
        break;
      }
    }
  }

  HungarianResult result;
  result.assignment = std::move(assignment);
  for (std::size_t r = 0; r < rows; ++r) {
    if (result.assignment[r] >= 0) {
      result.total_cost += cost.at(r, static_cast<std::size_t>(result.assignment[r]));
    }
  }
  return result;
}

namespace {

std::vector<int> distinct_sorted(const std::vector<int>& labels) {
  std::vector<int> out = labels;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Matrix contingency_table(const std::vector<int>& pred, const std::vector<int>& ref,
                         const std::vector<int>& pred_values, const std::vector<int>& ref_values) {
  std::map<int, std::size_t> pred_index, ref_index;
  for (std::size_t i = 0; i < pred_values.size(); ++i) pred_index[pred_values[i]] = i;
  for (std::size_t i = 0; i < ref_values.size(); ++i) ref_index[ref_values[i]] = i;
  Matrix table(pred_values.size(), ref_values.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    table.at(pred_index.at(pred[i]), ref_index.at(ref[i])) += 1.0;
  }
  return table;
}

}  // namespace

AlignmentResult align_labels(const std::vector<int>& pred, const std::vector<int>& ref,
                             AlignmentMode mode) {
  if (pred.size() != ref.size()) throw ValidationError("align_labels: length mismatch");
  if (pred.empty()) throw ValidationError("align_labels: empty labelings");

  const std::vector<int> pred_values = distinct_sorted(pred);
  const std::vector<int> ref_values = distinct_sorted(ref);
  const Matrix table = contingency_table(pred, ref, pred_values, ref_values);

  AlignmentResult result;
  result.mode = mode;
  if (mode == AlignmentMode::kOneToOne) {
    Matrix negated(table.rows(), table.cols());
    for (std::size_t i = 0; i < table.values().size(); ++i) {
      negated.values()[i] = -table.values()[i];
    }
    const HungarianResult hr = hungarian(negated);
    for (std::size_t p = 0; p < pred_values.size(); ++p) {
      if (hr.assignment[p] >= 0) {
        result.mapping[pred_values[p]] = ref_values[static_cast<std::size_t>(hr.assignment[p])];
      } else {
        result.unmatched_predicted.insert(pred_values[p]);
      }
    }
  } else {
    for (std::size_t p = 0; p < pred_values.size(); ++p) {
      std::size_t best = 0;
      for (std::size_t r = 1; r < ref_values.size(); ++r) {
        if (table.at(p, r) > table.at(p, best)) best = r;  // tie keeps smaller ref
      }
      result.mapping[pred_values[p]] = ref_values[best];
    }
  }
  return result;
}

MetricsReport compute_metrics(const std::vector<int>& pred, const std::vector<int>& ref,
                              AlignmentMode mode) {
  if (pred.size() != ref.size()) throw ValidationError("compute_metrics: length mismatch");
  if (pred.empty()) throw ValidationError("compute_metrics: empty labelings");
  const double n = static_cast<double>(pred.size());

  MetricsReport report;
  report.pred_labels = distinct_sorted(pred);
  report.ref_labels = distinct_sorted(ref);
  report.contingency = contingency_table(pred, ref, report.pred_labels, report.ref_labels);
  report.alignment = align_labels(pred, ref, mode);

  // ACC: points in unmatched predicted clusters are always wrong.
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto it = report.alignment.mapping.find(pred[i]);
    if (it != report.alignment.mapping.end() && it->second == ref[i]) ++correct;
  }
  report.acc = static_cast<double>(correct) / n;

  // Marginals.
  const std::size_t np = report.pred_labels.size();
  const std::size_t nr = report.ref_labels.size();
  std::vector<double> pred_marginal(np, 0.0), ref_marginal(nr, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      pred_marginal[i] += report.contingency.at(i, j);
      ref_marginal[j] += report.contingency.at(i, j);
    }
  }

  // NMI with natural-log entropies; both-constant labelings score 1.
  double h_pred = 0.0, h_ref = 0.0, mutual = 0.0;
  for (std::size_t j = 0; j < nr; ++j) {
    const double q = ref_marginal[j] / n;
    if (q > 0.0) h_ref -= q * std::log(q);
  }
  for (std::size_t i = 0; i < np; ++i) {
    const double q = pred_marginal[i] / n;
    if (q > 0.0) h_pred -= q * std::log(q);
  }
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const double nij = report.contingency.at(i, j);
      if (nij > 0.0) {
        mutual += (nij / n) * std::log(n * nij / (pred_marginal[i] * ref_marginal[j]));
      }
    }
  }
  report.nmi = (h_pred + h_ref) == 0.0 ? 1.0 : 2.0 * mutual / (h_pred + h_ref);
  report.nmi = std::min(1.0, std::max(0.0, report.nmi));

  // Adjusted Rand on the contingency table.
  const auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nr; ++j) index += pairs(report.contingency.at(i, j));
    sum_a += pairs(pred_marginal[i]);
  }
  for (std::size_t j = 0; j < nr; ++j) sum_b += pairs(ref_marginal[j]);
  const double expected = sum_a * sum_b / pairs(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  report.ari_raw = (max_index == expected) ? 1.0 : (index - expected) / (max_index - expected);
  report.ari = std::min(1.0, std::max(0.0, report.ari_raw));

  // Macro P/R/F1 over reference labels; unmatched predictions never enter a
  // class's predicted pool, so their points count only against recall.
  std::map<int, std::size_t> ref_index;
  for (std::size_t j = 0; j < nr; ++j) ref_index[report.ref_labels[j]] = j;
  std::vector<double> tp(nr, 0.0), predicted_as(nr, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    const auto it = report.alignment.mapping.find(report.pred_labels[i]);
    if (it == report.alignment.mapping.end()) continue;
    const std::size_t target = ref_index.at(it->second);
    predicted_as[target] += pred_marginal[i];
    tp[target] += report.contingency.at(i, target);
  }
  double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
  for (std::size_t j = 0; j < nr; ++j) {
    const double p = predicted_as[j] > 0.0 ? tp[j] / predicted_as[j] : 0.0;
    const double r = ref_marginal[j] > 0.0 ? tp[j] / ref_marginal[j] : 0.0;
    macro_p += p;
    macro_r += r;
    macro_f1 += (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  report.precision = macro_p / static_cast<double>(nr);
  report.recall = macro_r / static_cast<double>(nr);
  report.f1 = macro_f1 / static_cast<double>(nr);
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["acc"] = acc;
  j["nmi"] = nmi;
  j["ari"] = ari;
  j["ari_raw"] = ari_raw;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["mode"] = alignment.mode == AlignmentMode::kOneToOne ? "one_to_one" : "overlapping";
  nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
  for (const auto& [p, r] : alignment.mapping) mapping[std::to_string(p)] = r;
  j["mapping"] = mapping;
  j["unmatched_predicted"] = alignment.unmatched_predicted;
  j["pred_labels"] = pred_labels;
  j["ref_labels"] = ref_labels;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < contingency.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < contingency.cols(); ++c) {
      row.push_back(static_cast<long long>(contingency.at(i, c)));
    }
    rows.push_back(row);
  }
  j["contingency"] = rows;
  return j.dump(2);
}

}  // namespace intentforge
