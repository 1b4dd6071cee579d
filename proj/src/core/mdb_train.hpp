// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_MDB_TRAIN_HPP
#define INTENTFORGE_CORE_MDB_TRAIN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/embeddings.hpp"
#include "core/optim.hpp"
#include "core/views.hpp"

namespace intentforge {

enum class IterationRule { kLargestDatasetOverBatch, kExplicit };

struct MdbConfig {
  double tau = 0.05;
  std::size_t batch_size = 64;
  std::size_t epochs = 30;
  double learning_rate = 5e-6;
  double weight_decay = 1e-2;
  double warmup_fraction = 0.1;
  IterationRule iterations_per_epoch_rule = IterationRule::kLargestDatasetOverBatch;
  std::size_t explicit_iterations = 0;
  std::uint64_t rng_seed = 0;
  // Head architecture; the backbone is frozen, only this stack trains.
  std::vector<std::size_t> hidden_dims = {256};
  std::size_t output_dim = 256;

  void validate() const;
};

// Named presets: "paper" mirrors the published schedule, "desk" is sized for
// the synthetic fixtures (small head, larger learning rate).
MdbConfig mdb_preset(const std::string& name);

struct LossTracePoint {
  std::size_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct MdbTrainResult {
  ProjectionHead head;
  std::vector<LossTracePoint> trace;
  std::map<std::string, double> validation_accuracy;  // per dataset, held-out split
};

// Mean cross-entropy of the per-dataset cosine softmax over one multi-domain
// batch, with analytic gradients for all layers and every touched dataset
// head. Samples of dataset k see only the L^k weights of that dataset.
std::pair<double, HeadGradients> cosine_softmax_loss(const ProjectionHead& head,
                                                     const DomainBatch& batch,
                                                     const EmbeddingTable& base_embeddings,
                                                     double tau);

// Full MDB training loop: domain batches, cosine softmax, AdamW with
// warmup-cosine schedule. Splits each dataset 70/20/10 and reports held-out
// accuracy by nearest normalized class weight.
MdbTrainResult train_mdb(const MdbConfig& config, const DatasetRegistry& registry,
                         const EmbeddingTable& base_embeddings, Rng& rng);

void save_loss_trace_csv(const std::vector<LossTracePoint>& trace, const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_MDB_TRAIN_HPP
