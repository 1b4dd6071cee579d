// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_CLASSIFIER_HPP
#define INTENTFORGE_CORE_CLASSIFIER_HPP

#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace intentforge {

// Multinomial logistic regression over the multi-view space; classes are the
// induced schema's cluster ids.
struct LinearClassifier {
  Matrix weights;             // C x d
  std::vector<double> biases; // C
  std::vector<int> class_ids; // schema cluster ids, sorted ascending
};

struct ClassifierConfig {
  double l2_penalty = 1e-4;
  double step_size = 1.0;  // initial trial step; backtracking cuts it as needed
  double gradient_tolerance = 1e-6;
  std::size_t max_iterations = 1000;
};

// Full-batch gradient descent with L2 penalty until the gradient norm drops
// below tolerance or max_iterations is reached. The step size backs off
// whenever a step would increase the penalized loss, so the trace is
// non-increasing.
LinearClassifier train_classifier(const Matrix& h, const std::vector<int>& schema_labels,
                                  const ClassifierConfig& config = {});

// Argmax of affine scores per row; ties go to the smaller class id.
std::vector<int> predict(const LinearClassifier& classifier, const Matrix& h_test);

void save_classifier(const LinearClassifier& classifier, const std::string& path);
LinearClassifier load_classifier(const std::string& path);

void save_predictions_jsonl(const std::vector<int>& labels,
                            const std::vector<std::string>& utterance_ids,
                            const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_CLASSIFIER_HPP
