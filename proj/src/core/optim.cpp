// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/optim.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace intentforge {

HeadGradients HeadGradients::zeros_like(const ProjectionHead& head, bool with_dataset_heads) {
  HeadGradients g;
  for (const auto& layer : head.layers) {
    g.layers.push_back({Matrix(layer.weight.rows(), layer.weight.cols()),
                        std::vector<double>(layer.bias.size(), 0.0)});
  }
  if (with_dataset_heads) {
    for (const auto& [id, w] : head.dataset_heads) {
      g.dataset_heads.emplace(id, Matrix(w.rows(), w.cols()));
    }
  }
  return g;
}

std::vector<double> flatten_parameters(const ProjectionHead& head, bool with_dataset_heads) {
  std::vector<double> flat;
  for (const auto& layer : head.layers) {
    flat.insert(flat.end(), layer.weight.values().begin(), layer.weight.values().end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  if (with_dataset_heads) {
    for (const auto& [id, w] : head.dataset_heads) {
      flat.insert(flat.end(), w.values().begin(), w.values().end());
    }
  }
  return flat;
}

void unflatten_parameters(ProjectionHead& head, std::span<const double> flat,
                          bool with_dataset_heads) {
  std::size_t pos = 0;
  const auto take = [&](double* dst, std::size_t count) {
    if (pos + count > flat.size()) throw ValidationError("unflatten_parameters: vector too short");
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + count), dst);
    pos += count;
  };
  for (auto& layer : head.layers) {
    take(layer.weight.values().data(), layer.weight.values().size());
    take(layer.bias.data(), layer.bias.size());
  }
  if (with_dataset_heads) {
    for (auto& [id, w] : head.dataset_heads) take(w.values().data(), w.values().size());
  }
  if (pos != flat.size()) throw ValidationError("unflatten_parameters: vector too long");
}

std::vector<double> flatten_gradients(const HeadGradients& grads, bool with_dataset_heads) {
  std::vector<double> flat;
  for (const auto& layer : grads.layers) {
    flat.insert(flat.end(), layer.weight.values().begin(), layer.weight.values().end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  if (with_dataset_heads) {
    for (const auto& [id, w] : grads.dataset_heads) {
      flat.insert(flat.end(), w.values().begin(), w.values().end());
    }
  }
  return flat;
}

ForwardCache forward_cached(const ProjectionHead& head, std::span<const double> input) {
  if (input.size() != head.input_dim) throw ValidationError("forward_cached: input dim mismatch");
  ForwardCache cache;
  cache.activations.emplace_back(input.begin(), input.end());
  for (std::size_t li = 0; li < head.layers.size(); ++li) {
    const AffineLayer& layer = head.layers[li];
    const bool last = li + 1 == head.layers.size();
    const auto& z = cache.activations.back();
    std::vector<double> next(layer.weight.rows());
    for (std::size_t o = 0; o < next.size(); ++o) {
      const double a = dot(layer.weight.row(o), std::span<const double>(z)) + layer.bias[o];
      next[o] = last ? a : std::tanh(a);
    }
    cache.activations.push_back(std::move(next));
  }
  return cache;
}

void backward_accumulate(const ProjectionHead& head, const ForwardCache& cache,
                         std::vector<double> grad_output, HeadGradients& grads) {
  std::vector<double> grad = std::move(grad_output);
  for (std::size_t li = head.layers.size(); li-- > 0;) {
    const AffineLayer& layer = head.layers[li];
    const bool last = li + 1 == head.layers.size();
    const auto& out = cache.activations[li + 1];
    const auto& in = cache.activations[li];
    // tanh'(a) = 1 - z^2 using the cached post-activation.
    std::vector<double> grad_pre(grad.size());
    for (std::size_t o = 0; o < grad.size(); ++o) {
      grad_pre[o] = last ? grad[o] : grad[o] * (1.0 - out[o] * out[o]);
    }
    AffineLayer& layer_grad = grads.layers[li];
    for (std::size_t o = 0; o < grad_pre.size(); ++o) {
      layer_grad.bias[o] += grad_pre[o];
      for (std::size_t c = 0; c < in.size(); ++c) {
        layer_grad.weight.at(o, c) += grad_pre[o] * in[c];
      }
    }
    if (li == 0) break;
    std::vector<double> grad_in(in.size(), 0.0);
    for (std::size_t o = 0; o < grad_pre.size(); ++o) {
      for (std::size_t c = 0; c < in.size(); ++c) {
        grad_in[c] += layer.weight.at(o, c) * grad_pre[o];
      }
    }
    grad = std::move(grad_in);
  }
}

double cosine_softmax_sample(std::span<const double> h, const Matrix& class_weights,
                             std::size_t target, double tau, double scale,
                             std::vector<double>& grad_h, Matrix* grad_weights) {
  if (tau <= 0.0) throw ValidationError("cosine_softmax_sample: tau must be positive");
  const std::size_t num_classes = class_weights.rows();
  if (target >= num_classes) throw ValidationError("cosine_softmax_sample: target out of range");
  const std::size_t d = h.size();
  if (class_weights.cols() != d) {
    throw ValidationError("cosine_softmax_sample: weight dimension mismatch");
  }

  const double h_norm = l2_norm(h);
  if (h_norm == 0.0) throw DomainError("cosine_softmax_sample: zero-norm representation");
  std::vector<double> h_hat(d);
  for (std::size_t i = 0; i < d; ++i) h_hat[i] = h[i] / h_norm;

  std::vector<double> w_norms(num_classes);
  std::vector<double> logits(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    w_norms[c] = l2_norm(class_weights.row(c));
    if (w_norms[c] == 0.0) throw DomainError("cosine_softmax_sample: zero-norm class weight");
    logits[c] = dot(std::span<const double>(h_hat), class_weights.row(c)) / (w_norms[c] * tau);
  }

  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  std::vector<double> probs(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    probs[c] = std::exp(logits[c] - max_logit);
    denom += probs[c];
  }
  for (double& p : probs) p /= denom;
  const double loss = -(logits[target] - max_logit - std::log(denom));

  // d(loss)/d(logit_c) = p_c - [c == target].
  std::vector<double> grad_h_hat(d, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double dl = probs[c] - (c == target ? 1.0 : 0.0);
    const auto w = class_weights.row(c);
    const double cos_cw = logits[c] * tau;  // h_hat . w_hat
    for (std::size_t i = 0; i < d; ++i) {
      grad_h_hat[i] += dl * w[i] / (w_norms[c] * tau);
    }
    if (grad_weights != nullptr) {
      // d(logit)/dw = (h_hat - cos * w_hat) / (|w| tau).
      for (std::size_t i = 0; i < d; ++i) {
        const double w_hat_i = w[i] / w_norms[c];
        grad_weights->at(c, i) += scale * dl * (h_hat[i] - cos_cw * w_hat_i) / (w_norms[c] * tau);
      }
    }
  }

  // Through the h normalization: dh_hat/dh = (I - h_hat h_hat^T) / |h|.
  const double radial = dot(std::span<const double>(grad_h_hat), std::span<const double>(h_hat));
  for (std::size_t i = 0; i < d; ++i) {
    grad_h[i] += scale * (grad_h_hat[i] - radial * h_hat[i]) / h_norm;
  }
  return loss;
}

OptimizerState OptimizerState::zeros(std::size_t param_count) {
  OptimizerState s;
  s.first_moment.assign(param_count, 0.0);
  s.second_moment.assign(param_count, 0.0);
  return s;
}

double effective_lr(const ScheduleConfig& config, std::size_t step) {
  const auto warmup_steps = static_cast<std::size_t>(
      config.warmup_fraction * static_cast<double>(config.total_steps));
  if (warmup_steps > 0 && step <= warmup_steps) {
    return config.learning_rate * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  const std::size_t decay_steps = config.total_steps - warmup_steps;
  if (decay_steps == 0) return config.learning_rate;
  const double progress =
      static_cast<double>(std::min(step, config.total_steps) - warmup_steps) /
      static_cast<double>(decay_steps);
  return config.learning_rate * 0.5 * (1.0 + std::cos(M_PI * progress));
}

void optimizer_step(OptimizerState& state, std::span<double> params, std::span<const double> grads,
                    const ScheduleConfig& config) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ValidationError("optimizer_step: shape mismatch");
  }
  ++state.step;
  const double lr = effective_lr(config, state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = config.beta1 * m + (1.0 - config.beta1) * grads[i];
    v = config.beta2 * v + (1.0 - config.beta2) * grads[i] * grads[i];
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    params[i] -= lr * (m_hat / (std::sqrt(v_hat) + config.epsilon) +
                       config.weight_decay * params[i]);
  }
}

}  // namespace intentforge
