// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_OPTIM_HPP
#define INTENTFORGE_CORE_OPTIM_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/views.hpp"

namespace intentforge {

// Parameter-shaped gradients for a projection head.
struct HeadGradients {
  std::vector<AffineLayer> layers;
  std::map<std::string, Matrix> dataset_heads;

  static HeadGradients zeros_like(const ProjectionHead& head, bool with_dataset_heads);
};

// Flattening order: layers in order (weight then bias), then dataset heads in
// id order. Both directions must agree so optimizer state lines up.
std::vector<double> flatten_parameters(const ProjectionHead& head, bool with_dataset_heads);
void unflatten_parameters(ProjectionHead& head, std::span<const double> flat,
                          bool with_dataset_heads);
std::vector<double> flatten_gradients(const HeadGradients& grads, bool with_dataset_heads);

// Per-sample forward pass keeping post-nonlinearity activations for backprop.
struct ForwardCache {
  // activations[0] is the input row; activations[L] is the linear output.
  std::vector<std::vector<double>> activations;
};
ForwardCache forward_cached(const ProjectionHead& head, std::span<const double> input);

// Accumulates d(loss)/d(layer params) given d(loss)/d(output row).
void backward_accumulate(const ProjectionHead& head, const ForwardCache& cache,
                         std::vector<double> grad_output, HeadGradients& grads);

// Cross-entropy of a temperature-scaled cosine softmax between a raw output
// row h and a set of class weight rows. Returns the sample loss; accumulates
// scale * d(loss)/dh into grad_h and, when grad_weights is non-null,
// scale * d(loss)/d(weights) into it (gradients flow through both
// normalizations). Zero-norm h or weight row is a domain error.
double cosine_softmax_sample(std::span<const double> h, const Matrix& class_weights,
                             std::size_t target, double tau, double scale,
                             std::vector<double>& grad_h, Matrix* grad_weights);

// AdamW with linear warmup then cosine decay to zero.
struct ScheduleConfig {
  double learning_rate = 5e-6;
  double weight_decay = 1e-2;
  double warmup_fraction = 0.1;
  std::size_t total_steps = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step = 0;

  static OptimizerState zeros(std::size_t param_count);
};

// Effective learning rate at a 1-based step count.
double effective_lr(const ScheduleConfig& config, std::size_t step);

// One decoupled-weight-decay adaptive-moment update; advances state.step.
void optimizer_step(OptimizerState& state, std::span<double> params, std::span<const double> grads,
                    const ScheduleConfig& config);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_OPTIM_HPP
