// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/mdb_train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/log.hpp"

namespace intentforge {

void MdbConfig::validate() const {
  if (tau <= 0.0) throw ConfigError("mdb: tau must be positive");
  if (warmup_fraction < 0.0 || warmup_fraction >= 1.0) {
    throw ConfigError("mdb: warmup_fraction must be in [0, 1)");
  }
  if (batch_size == 0) throw ConfigError("mdb: batch_size must be positive");
  if (iterations_per_epoch_rule == IterationRule::kExplicit && explicit_iterations == 0) {
    throw ConfigError("mdb: explicit iteration rule needs explicit_iterations > 0");
  }
  if (output_dim == 0) throw ConfigError("mdb: output_dim must be positive");
}

MdbConfig mdb_preset(const std::string& name) {
  MdbConfig config;
  if (name == "paper") {
    return config;  // defaults mirror the published schedule
  }
  if (name == "desk") {
    config.learning_rate = 1e-3;
    config.epochs = 20;
    config.batch_size = 24;
    config.hidden_dims = {32};
    config.output_dim = 32;
    return config;
  }
  throw ConfigError("unknown MDB preset: " + name);
}

std::pair<double, HeadGradients> cosine_softmax_loss(const ProjectionHead& head,
                                                     const DomainBatch& batch,
                                                     const EmbeddingTable& base_embeddings,
                                                     double tau) {
  const std::size_t total = batch.total_size();
  if (total == 0) throw ValidationError("cosine_softmax_loss: empty batch");
  HeadGradients grads = HeadGradients::zeros_like(head, /*with_dataset_heads=*/true);
  const double scale = 1.0 / static_cast<double>(total);

  double loss_sum = 0.0;
  for (const auto& group : batch.groups) {
    const auto head_it = head.dataset_heads.find(group.dataset_id);
    if (head_it == head.dataset_heads.end()) {
      throw ValidationError("cosine_softmax_loss: no classification head for dataset '" +
                            group.dataset_id + "'");
    }
    Matrix& weight_grads = grads.dataset_heads.at(group.dataset_id);
    for (const auto& [utterance_id, intent_index] : group.samples) {
      const ForwardCache cache = forward_cached(head, base_embeddings.at(utterance_id));
      std::vector<double> grad_h(head.output_dim, 0.0);
      loss_sum += cosine_softmax_sample(cache.activations.back(), head_it->second, intent_index,
                                        tau, scale, grad_h, &weight_grads);
      backward_accumulate(head, cache, std::move(grad_h), grads);
    }
  }
  return {loss_sum * scale, std::move(grads)};
}

namespace {

struct DatasetSplit {
  std::vector<UtteranceRecord> train;
  std::vector<UtteranceRecord> valid;
};

// 70/20/10 per-dataset split of the labeled records; the trailing 10% test
// share is held back entirely.
DatasetSplit split_dataset(const RegisteredDataset& ds, Rng& rng) {
  std::vector<const UtteranceRecord*> labeled;
  for (const auto& rec : ds.records) {
    if (DatasetRegistry::intent_index(ds, rec)) labeled.push_back(&rec);
  }
  rng.shuffle(labeled);
  const std::size_t n = labeled.size();
  std::size_t n_train = static_cast<std::size_t>(0.7 * static_cast<double>(n));
  if (n_train == 0) n_train = n;  // tiny fixtures train on everything
  const std::size_t n_valid = static_cast<std::size_t>(0.2 * static_cast<double>(n));
  DatasetSplit split;
  for (std::size_t i = 0; i < n_train && i < n; ++i) split.train.push_back(*labeled[i]);
  for (std::size_t i = n_train; i < n_train + n_valid && i < n; ++i) {
    split.valid.push_back(*labeled[i]);
  }
  return split;
}

// Nearest normalized class weight, the classification rule the cosine
// softmax optimizes.
double head_accuracy(const ProjectionHead& head, const RegisteredDataset& ds,
                     const std::vector<UtteranceRecord>& records,
                     const EmbeddingTable& embeddings, const Matrix& class_weights) {
  if (records.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& rec : records) {
    const ForwardCache cache = forward_cached(head, embeddings.at(rec.utterance_id));
    const auto& h = cache.activations.back();
    const double h_norm = l2_norm(h);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < class_weights.rows(); ++c) {
      const double score = dot(std::span<const double>(h), class_weights.row(c)) /
                           (h_norm * l2_norm(class_weights.row(c)));
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    if (best == *DatasetRegistry::intent_index(ds, rec)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

}  // namespace

MdbTrainResult train_mdb(const MdbConfig& config, const DatasetRegistry& registry,
                         const EmbeddingTable& base_embeddings, Rng& rng) {
  config.validate();
  if (registry.dataset_count() == 0) throw ConfigError("train_mdb: empty registry");

  // Every labeled record must be embedded before training starts.
  for (const auto& id : registry.dataset_ids()) {
    for (const auto& rec : registry.dataset(id).records) {
      if (rec.gold_intent && !base_embeddings.has(rec.utterance_id)) {
        throw ValidationError("train_mdb: no embedding for record '" + rec.utterance_id + "'");
      }
    }
  }

  Rng split_rng(rng.fork_seed("mdb/split"));
  DatasetRegistry train_registry;
  std::map<std::string, DatasetSplit> splits;
  std::size_t largest_train = 0;
  for (const auto& id : registry.dataset_ids()) {
    const RegisteredDataset& ds = registry.dataset(id);
    DatasetSplit split = split_dataset(ds, split_rng);
    largest_train = std::max(largest_train, split.train.size());
    train_registry.add(id, RegisteredDataset{split.train, ds.labels});
    splits.emplace(id, std::move(split));
  }

  std::size_t iters = config.iterations_per_epoch_rule == IterationRule::kExplicit
                          ? config.explicit_iterations
                          : (largest_train + config.batch_size - 1) / config.batch_size;
  iters = std::max<std::size_t>(iters, 1);

  Rng init_rng(rng.fork_seed("mdb/init"));
  MdbTrainResult result;
  result.head = init_head("MDB", base_embeddings.dim(), config.hidden_dims, config.output_dim,
                          init_rng);
  for (const auto& id : registry.dataset_ids()) {
    add_dataset_head(result.head, id, registry.dataset(id).labels.size(), init_rng);
  }

  ScheduleConfig schedule;
  schedule.learning_rate = config.learning_rate;
  schedule.weight_decay = config.weight_decay;
  schedule.warmup_fraction = config.warmup_fraction;
  schedule.total_steps = std::max<std::size_t>(config.epochs * iters, 1);

  std::vector<double> params = flatten_parameters(result.head, true);
  OptimizerState state = OptimizerState::zeros(params.size());
  Rng batch_rng(rng.fork_seed("mdb/batches"));

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t it = 0; it < iters; ++it) {
      const DomainBatch batch =
          build_domain_batch(train_registry, config.batch_size, batch_rng);
      auto [loss, grads] = cosine_softmax_loss(result.head, batch, base_embeddings, config.tau);
      const std::vector<double> flat_grads = flatten_gradients(grads, true);
      optimizer_step(state, params, flat_grads, schedule);
      unflatten_parameters(result.head, params, true);
      result.trace.push_back({state.step, loss, effective_lr(schedule, state.step)});
    }
    IF_LOG_INFO("mdb epoch " << epoch + 1 << "/" << config.epochs << " loss="
                             << (result.trace.empty() ? 0.0 : result.trace.back().loss));
  }

  for (const auto& id : registry.dataset_ids()) {
    const auto& split = splits.at(id);
    if (split.valid.empty()) continue;
    result.validation_accuracy[id] =
        head_accuracy(result.head, registry.dataset(id), split.valid, base_embeddings,
                      result.head.dataset_heads.at(id));
  }
  return result;
}

void save_loss_trace_csv(const std::vector<LossTracePoint>& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write loss trace: " + path);
  os << "step,loss,lr\n";
  for (const auto& p : trace) {
    os << p.step << "," << nlohmann::json(p.loss).dump() << "," << nlohmann::json(p.lr).dump()
       << "\n";
  }
}

}  // namespace intentforge
