// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_PGT_TRAIN_HPP
#define INTENTFORGE_CORE_PGT_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/clustering.hpp"
#include "core/corpus.hpp"
#include "core/embeddings.hpp"
#include "core/optim.hpp"
#include "core/views.hpp"

namespace intentforge {

// Two identical heads initialized from the same MDB checkpoint. The learnable
// twin produces the pseudo-labels; the fixed twin carries the gradients.
struct SiamesePair {
  ProjectionHead learnable;
  ProjectionHead fixed;

  static SiamesePair from_checkpoint(const ProjectionHead& mdb_head);
};

enum class FixedRefresh { kNever, kPerEpoch, kEveryNSteps };

struct PgtConfig {
  double tau_pgt = 0.1;        // soft-label temperature
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double learning_rate = 5e-6;
  double weight_decay = 1e-2;
  double warmup_fraction = 0.1;
  std::size_t kmeans_n_init = 3;  // restarts inside a step
  FixedRefresh refresh = FixedRefresh::kPerEpoch;
  std::size_t refresh_every_n_steps = 0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

PgtConfig pgt_preset(const std::string& name);

struct PgtStepTrace {
  std::vector<int> pseudo_labels;        // after remapping
  std::vector<std::size_t> remap;        // learnable cluster -> fixed cluster
  double loss = 0.0;
  HeadGradients grad_fixed;
  HeadGradients grad_transferred;
};

// Permutation matching learnable centroids to fixed centroids, maximizing the
// summed cosine similarity of matched pairs (Hungarian on negated similarity).
std::vector<std::size_t> remap_clusters(const Matrix& centroids_learnable,
                                        const Matrix& centroids_fixed);

// grad_learnable = grad_fixed + (w_learnable - w_fixed), elementwise.
std::vector<double> transfer_gradient(std::span<const double> grad_fixed,
                                      std::span<const double> w_learnable,
                                      std::span<const double> w_fixed);

// Cross-entropy between hard pseudo-labels and the fixed twin's soft labels
// (softmax over cosine similarity to the given centroids, temperature tau).
// Centroids and labels are constants; gradients flow only through the fixed
// twin's representation path. Only layer tensors receive gradients.
std::pair<double, HeadGradients> pgt_fixed_loss(const ProjectionHead& fixed, const Matrix& rows,
                                                const std::vector<int>& hard_labels,
                                                const Matrix& centroids, double tau);

// One Siamese step: cluster the learnable twin's outputs, build the fixed
// twin's soft labels for the same partition, remap, differentiate, transfer,
// and update the learnable twin. The fixed twin is never touched here.
PgtStepTrace pgt_step(SiamesePair& pair, const Matrix& batch_rows, std::size_t k,
                      OptimizerState& state, const ScheduleConfig& schedule,
                      const PgtConfig& config, Rng& rng);

struct PgtEpochTrace {
  std::size_t epoch = 0;
  double heldout_acc = 0.0;         // kmeans on learnable outputs vs gold, one-to-one
  double heldout_silhouette = 0.0;
};

struct PgtStepLog {
  std::size_t step = 0;
  std::string dataset_id;
  double loss = 0.0;
  bool remap_is_identity = true;
};

struct PgtTrainResult {
  ProjectionHead head;  // the learnable twin, relabeled as the PGT view
  std::vector<PgtEpochTrace> epoch_trace;
  std::vector<PgtStepLog> step_log;
};

// Per epoch, iterates datasets in registry order; per dataset, runs pgt_step
// over batches with K = that dataset's intent-label count. The fixed twin is
// refreshed per the configured cadence.
PgtTrainResult train_pgt(const PgtConfig& config, const DatasetRegistry& registry,
                         const ProjectionHead& mdb_checkpoint,
                         const EmbeddingTable& base_embeddings, Rng& rng);

void save_pgt_step_log_csv(const std::vector<PgtStepLog>& log, const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_PGT_TRAIN_HPP
