// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/log.hpp"

namespace intentforge {

namespace {

// Penalized mean cross-entropy and its gradient. Weights carry the L2
// penalty; biases do not.
double softmax_loss(const Matrix& h, const std::vector<std::size_t>& targets, const Matrix& w,
                    const std::vector<double>& b, double l2, Matrix* grad_w,
                    std::vector<double>* grad_b) {
  const std::size_t n = h.rows();
  const std::size_t c = w.rows();
  if (grad_w != nullptr) {
    *grad_w = Matrix(c, w.cols());
    grad_b->assign(c, 0.0);
  }
  double loss = 0.0;
  std::vector<double> scores(c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) scores[j] = dot(w.row(j), h.row(i)) + b[j];
    const double max_score = *std::max_element(scores.begin(), scores.end());
    double denom = 0.0;
    for (std::size_t j = 0; j < c; ++j) denom += std::exp(scores[j] - max_score);
    loss += -(scores[targets[i]] - max_score - std::log(denom));
    if (grad_w != nullptr) {
      for (std::size_t j = 0; j < c; ++j) {
        const double p = std::exp(scores[j] - max_score) / denom;
        const double dl = (p - (j == targets[i] ? 1.0 : 0.0)) / static_cast<double>(n);
        (*grad_b)[j] += dl;
        for (std::size_t d = 0; d < w.cols(); ++d) grad_w->at(j, d) += dl * h.at(i, d);
      }
    }
  }
  loss /= static_cast<double>(n);
  double penalty = 0.0;
  for (const double v : w.values()) penalty += v * v;
  loss += 0.5 * l2 * penalty;
  if (grad_w != nullptr) {
    for (std::size_t idx = 0; idx < w.values().size(); ++idx) {
      grad_w->values()[idx] += l2 * w.values()[idx];
    }
  }
  return loss;
}

double grad_norm(const Matrix& grad_w, const std::vector<double>& grad_b) {
  double s = dot(std::span<const double>(grad_w.values()),
                 std::span<const double>(grad_w.values()));
  s += dot(std::span<const double>(grad_b), std::span<const double>(grad_b));
  return std::sqrt(s);
}

}  // namespace

LinearClassifier train_classifier(const Matrix& h, const std::vector<int>& schema_labels,
                                  const ClassifierConfig& config) {
  if (h.empty()) throw ValidationError("train_classifier: empty input");
  if (schema_labels.size() != h.rows()) {
    throw ValidationError("train_classifier: label count does not match rows");
  }

  std::vector<int> class_ids = schema_labels;
  std::sort(class_ids.begin(), class_ids.end());
  class_ids.erase(std::unique(class_ids.begin(), class_ids.end()), class_ids.end());
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < class_ids.size(); ++i) index[class_ids[i]] = i;
  std::vector<std::size_t> targets(h.rows());
  for (std::size_t i = 0; i < h.rows(); ++i) targets[i] = index.at(schema_labels[i]);

  LinearClassifier clf;
  clf.class_ids = class_ids;
  clf.weights = Matrix(class_ids.size(), h.cols());
  clf.biases.assign(class_ids.size(), 0.0);
  if (class_ids.size() == 1) return clf;  // degenerate: always predicts the class

  Matrix grad_w;
  std::vector<double> grad_b;
  double loss = softmax_loss(h, targets, clf.weights, clf.biases, config.l2_penalty, &grad_w,
                             &grad_b);
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    if (grad_norm(grad_w, grad_b) < config.gradient_tolerance) break;

    // Backtracking keeps the descent monotone; the trial step restarts every
    // iteration so one early overshoot cannot stall the rest of the descent.
    double step = config.step_size;
    for (;;) {
      Matrix w_next = clf.weights;
      std::vector<double> b_next = clf.biases;
      for (std::size_t idx = 0; idx < w_next.values().size(); ++idx) {
        w_next.values()[idx] -= step * grad_w.values()[idx];
      }
      for (std::size_t j = 0; j < b_next.size(); ++j) b_next[j] -= step * grad_b[j];
      const double next_loss =
          softmax_loss(h, targets, w_next, b_next, config.l2_penalty, nullptr, nullptr);
      if (next_loss <= loss || step < 1e-12) {
        clf.weights = std::move(w_next);
        clf.biases = std::move(b_next);
        loss = next_loss;
        break;
      }
      step *= 0.5;
    }
    loss = softmax_loss(h, targets, clf.weights, clf.biases, config.l2_penalty, &grad_w, &grad_b);
  }
  IF_LOG_DEBUG("classifier final loss=" << loss);
  return clf;
}

std::vector<int> predict(const LinearClassifier& classifier, const Matrix& h_test) {
  if (h_test.cols() != classifier.weights.cols()) {
    throw ValidationError("predict: dimension mismatch");
  }
  std::vector<int> out(h_test.rows());
  for (std::size_t i = 0; i < h_test.rows(); ++i) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < classifier.weights.rows(); ++j) {
      const double score = dot(classifier.weights.row(j), h_test.row(i)) + classifier.biases[j];
      if (score > best_score) {  // strict > keeps the smaller class id on ties
        best_score = score;
        best = j;
      }
    }
    out[i] = classifier.class_ids[best];
  }
  return out;
}

void save_classifier(const LinearClassifier& classifier, const std::string& path) {
  nlohmann::ordered_json j;
  j["class_ids"] = classifier.class_ids;
  j["weights"] = {{"rows", classifier.weights.rows()},
                  {"cols", classifier.weights.cols()},
                  {"values", classifier.weights.values()}};
  j["biases"] = classifier.biases;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write classifier checkpoint: " + path);
  os << j.dump(2) << "\n";
}

LinearClassifier load_classifier(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open classifier checkpoint: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("classifier checkpoint is not valid JSON: " + std::string(e.what()));
  }
  LinearClassifier clf;
  clf.class_ids = j.at("class_ids").get<std::vector<int>>();
  clf.weights = Matrix(j.at("weights").at("rows").get<std::size_t>(),
                       j.at("weights").at("cols").get<std::size_t>(),
                       j.at("weights").at("values").get<std::vector<double>>());
  clf.biases = j.at("biases").get<std::vector<double>>();
  return clf;
}

void save_predictions_jsonl(const std::vector<int>& labels,
                            const std::vector<std::string>& utterance_ids,
                            const std::string& path) {
  if (labels.size() != utterance_ids.size()) {
    throw ValidationError("save_predictions_jsonl: id count mismatch");
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write predictions: " + path);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    nlohmann::ordered_json obj;
    obj["utterance_id"] = utterance_ids[i];
    obj["predicted_cluster"] = labels[i];
    os << obj.dump() << "\n";
  }
}

}  // namespace intentforge
