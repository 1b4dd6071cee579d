// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/pgt_train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/metrics.hpp"
#include "core/numerics.hpp"

namespace intentforge {

SiamesePair SiamesePair::from_checkpoint(const ProjectionHead& mdb_head) {
  SiamesePair pair;
  pair.learnable = mdb_head;
  pair.fixed = mdb_head;
  return pair;
}

void PgtConfig::validate() const {
  if (tau_pgt <= 0.0) throw ConfigError("pgt: tau_pgt must be positive");
  if (batch_size == 0) throw ConfigError("pgt: batch_size must be positive");
  if (warmup_fraction < 0.0 || warmup_fraction >= 1.0) {
    throw ConfigError("pgt: warmup_fraction must be in [0, 1)");
  }
  if (kmeans_n_init == 0) throw ConfigError("pgt: kmeans_n_init must be positive");
  if (refresh == FixedRefresh::kEveryNSteps && refresh_every_n_steps == 0) {
    throw ConfigError("pgt: every_n_steps refresh needs refresh_every_n_steps > 0");
  }
}

PgtConfig pgt_preset(const std::string& name) {
  PgtConfig config;
  if (name == "paper") return config;
  if (name == "desk") {
    config.learning_rate = 1e-3;
    config.epochs = 10;
    config.batch_size = 48;
    return config;
  }
  throw ConfigError("unknown PGT preset: " + name);
}

std::vector<std::size_t> remap_clusters(const Matrix& centroids_learnable,
                                        const Matrix& centroids_fixed) {
  if (centroids_learnable.rows() != centroids_fixed.rows() ||
      centroids_learnable.cols() != centroids_fixed.cols()) {
    throw ValidationError("remap_clusters: centroid shape mismatch");
  }
  const std::size_t k = centroids_learnable.rows();
  Matrix cost(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const double ni = l2_norm(centroids_learnable.row(i));
    for (std::size_t j = 0; j < k; ++j) {
      const double nj = l2_norm(centroids_fixed.row(j));
      const double sim = (ni > 0.0 && nj > 0.0)
                             ? dot(centroids_learnable.row(i), centroids_fixed.row(j)) / (ni * nj)
                             : 0.0;
      cost.at(i, j) = -sim;
    }
  }
  const HungarianResult hr = hungarian(cost);
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = static_cast<std::size_t>(hr.assignment[i]);
  return perm;
}

std::vector<double> transfer_gradient(std::span<const double> grad_fixed,
                                      std::span<const double> w_learnable,
                                      std::span<const double> w_fixed) {
  if (grad_fixed.size() != w_learnable.size() || grad_fixed.size() != w_fixed.size()) {
    throw ValidationError("transfer_gradient: shape mismatch");
  }
  std::vector<double> out(grad_fixed.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Grouped so equal twins contribute exactly zero and leave the gradient
    // bit-identical.
    out[i] = grad_fixed[i] + (w_learnable[i] - w_fixed[i]);
  }
  return out;
}

std::pair<double, HeadGradients> pgt_fixed_loss(const ProjectionHead& fixed, const Matrix& rows,
                                                const std::vector<int>& hard_labels,
                                                const Matrix& centroids, double tau) {
  if (hard_labels.size() != rows.rows()) throw ValidationError("pgt_fixed_loss: label mismatch");
  HeadGradients grads = HeadGradients::zeros_like(fixed, /*with_dataset_heads=*/false);
  const double scale = 1.0 / static_cast<double>(rows.rows());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const ForwardCache cache = forward_cached(fixed, rows.row(i));
    std::vector<double> grad_h(fixed.output_dim, 0.0);
    loss_sum += cosine_softmax_sample(cache.activations.back(), centroids,
                                      static_cast<std::size_t>(hard_labels[i]), tau, scale,
                                      grad_h, /*grad_weights=*/nullptr);
    backward_accumulate(fixed, cache, std::move(grad_h), grads);
  }
  return {loss_sum * scale, std::move(grads)};
}

PgtStepTrace pgt_step(SiamesePair& pair, const Matrix& batch_rows, std::size_t k,
                      OptimizerState& state, const ScheduleConfig& schedule,
                      const PgtConfig& config, Rng& rng) {
  if (k > batch_rows.rows()) throw ValidationError("pgt_step: K exceeds batch rows");

  const Matrix out_learnable = head_forward(pair.learnable, batch_rows);
  const ClusterAssignment km = kmeans(out_learnable, k, config.kmeans_n_init, 300, rng);

  const Matrix out_fixed = head_forward(pair.fixed, batch_rows);
  Matrix fixed_centroids(k, pair.fixed.output_dim);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < out_fixed.rows(); ++i) {
    const auto c = static_cast<std::size_t>(km.labels[i]);
    ++sizes[c];
    for (std::size_t d = 0; d < out_fixed.cols(); ++d) {
      fixed_centroids.at(c, d) += out_fixed.at(i, d);
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < fixed_centroids.cols(); ++d) {
      fixed_centroids.at(c, d) /= static_cast<double>(sizes[c]);
    }
  }

  PgtStepTrace trace;
  trace.remap = remap_clusters(km.centroids, fixed_centroids);
  trace.pseudo_labels.resize(km.labels.size());
  for (std::size_t i = 0; i < km.labels.size(); ++i) {
    trace.pseudo_labels[i] =
        static_cast<int>(trace.remap[static_cast<std::size_t>(km.labels[i])]);
  }

  auto [loss, grad_fixed] = pgt_fixed_loss(pair.fixed, batch_rows, trace.pseudo_labels,
                                           fixed_centroids, config.tau_pgt);
  trace.loss = loss;

  const std::vector<double> flat_grad_fixed = flatten_gradients(grad_fixed, false);
  std::vector<double> params_learnable = flatten_parameters(pair.learnable, false);
  const std::vector<double> params_fixed = flatten_parameters(pair.fixed, false);
  const std::vector<double> transferred =
      transfer_gradient(flat_grad_fixed, params_learnable, params_fixed);

  trace.grad_fixed = std::move(grad_fixed);
  trace.grad_transferred = HeadGradients::zeros_like(pair.learnable, false);
  {
    // Reuse the flattening layout to expose the transferred gradient in
    // parameter shape.
    ProjectionHead shaped = pair.learnable;
    unflatten_parameters(shaped, transferred, false);
    for (std::size_t li = 0; li < shaped.layers.size(); ++li) {
      trace.grad_transferred.layers[li] = shaped.layers[li];
    }
  }

  optimizer_step(state, params_learnable, transferred, schedule);
  unflatten_parameters(pair.learnable, params_learnable, false);
  return trace;
}

namespace {

struct PgtDatasetRows {
  std::string dataset_id;
  std::size_t k = 0;
  Matrix train_rows;                      // base embeddings, training share
  Matrix heldout_rows;                    // base embeddings, held-out share
  std::vector<int> heldout_gold;          // gold intent index, -1 for noise
};

double heldout_accuracy(const ProjectionHead& head, const PgtDatasetRows& ds, Rng& rng) {
  const Matrix out = head_forward(head, ds.heldout_rows);
  const ClusterAssignment km = kmeans(out, ds.k, 10, 300, rng);
  std::vector<int> pred, gold;
  for (std::size_t i = 0; i < ds.heldout_gold.size(); ++i) {
    if (ds.heldout_gold[i] >= 0) {
      pred.push_back(km.labels[i]);
      gold.push_back(ds.heldout_gold[i]);
    }
  }
  if (gold.empty()) return 0.0;
  return compute_metrics(pred, gold, AlignmentMode::kOneToOne).acc;
}

double heldout_silhouette(const ProjectionHead& head, const PgtDatasetRows& ds, Rng& rng) {
  const Matrix out = head_forward(head, ds.heldout_rows);
  const ClusterAssignment km = kmeans(out, ds.k, 10, 300, rng);
  return silhouette_score(out, km.labels);
}

}  // namespace

PgtTrainResult train_pgt(const PgtConfig& config, const DatasetRegistry& registry,
                         const ProjectionHead& mdb_checkpoint,
                         const EmbeddingTable& base_embeddings, Rng& rng) {
  config.validate();
  if (registry.dataset_count() == 0) throw ConfigError("train_pgt: empty registry");
  mdb_checkpoint.validate();

  // Assemble per-dataset row matrices; every record (noise included) flows
  // through PGT, only K comes from the label list.
  Rng split_rng(rng.fork_seed("pgt/split"));
  std::vector<PgtDatasetRows> datasets;
  for (const auto& id : registry.dataset_ids()) {
    const RegisteredDataset& ds = registry.dataset(id);
    if (ds.records.empty()) {
      throw ValidationError("train_pgt: dataset '" + id + "' has no records");
    }
    std::vector<const UtteranceRecord*> records;
    for (const auto& rec : ds.records) {
      if (!base_embeddings.has(rec.utterance_id)) {
        throw ValidationError("train_pgt: no embedding for record '" + rec.utterance_id + "'");
      }
      records.push_back(&rec);
    }
    split_rng.shuffle(records);
    const std::size_t n_heldout = records.size() / 5;
    const std::size_t n_train = records.size() - n_heldout;

    PgtDatasetRows entry;
    entry.dataset_id = id;
    entry.k = ds.labels.size();
    entry.train_rows = Matrix(n_train, base_embeddings.dim());
    entry.heldout_rows = Matrix(n_heldout, base_embeddings.dim());
    for (std::size_t i = 0; i < n_train; ++i) {
      const auto& v = base_embeddings.at(records[i]->utterance_id);
      std::copy(v.begin(), v.end(), entry.train_rows.row(i).begin());
    }
    for (std::size_t i = 0; i < n_heldout; ++i) {
      const UtteranceRecord& rec = *records[n_train + i];
      const auto& v = base_embeddings.at(rec.utterance_id);
      std::copy(v.begin(), v.end(), entry.heldout_rows.row(i).begin());
      const auto idx = DatasetRegistry::intent_index(ds, rec);
      entry.heldout_gold.push_back(idx ? static_cast<int>(*idx) : -1);
    }
    datasets.push_back(std::move(entry));
  }

  SiamesePair pair = SiamesePair::from_checkpoint(mdb_checkpoint);

  // Count steps up front so the schedule is fixed before training.
  std::size_t steps_per_epoch = 0;
  for (const auto& ds : datasets) {
    const std::size_t n = ds.train_rows.rows();
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t size = std::min(config.batch_size, n - start);
      if (size >= ds.k) ++steps_per_epoch;
    }
  }
  if (steps_per_epoch == 0 && config.epochs > 0) {
    throw ValidationError("train_pgt: no batch reaches K rows; enlarge batch_size or data");
  }

  ScheduleConfig schedule;
  schedule.learning_rate = config.learning_rate;
  schedule.weight_decay = config.weight_decay;
  schedule.warmup_fraction = config.warmup_fraction;
  schedule.total_steps = std::max<std::size_t>(config.epochs * steps_per_epoch, 1);

  OptimizerState state = OptimizerState::zeros(flatten_parameters(pair.learnable, false).size());
  Rng shuffle_rng(rng.fork_seed("pgt/shuffle"));
  const std::uint64_t step_seed_root = rng.fork_seed("pgt/steps");
  Rng eval_rng(rng.fork_seed("pgt/eval"));

  PgtTrainResult result;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto& ds : datasets) {
      const std::size_t n = ds.train_rows.rows();
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      shuffle_rng.shuffle(order);
      for (std::size_t start = 0; start < n; start += config.batch_size) {
        const std::size_t size = std::min(config.batch_size, n - start);
        if (size < ds.k) continue;
        Matrix batch(size, ds.train_rows.cols());
        for (std::size_t i = 0; i < size; ++i) {
          std::copy(ds.train_rows.row(order[start + i]).begin(),
                    ds.train_rows.row(order[start + i]).end(), batch.row(i).begin());
        }
        ++global_step;
        Rng step_rng(derive_seed(step_seed_root, "step/" + std::to_string(global_step)));
        const PgtStepTrace trace = pgt_step(pair, batch, ds.k, state, schedule, config, step_rng);
        bool identity = true;
        for (std::size_t i = 0; i < trace.remap.size(); ++i) identity &= (trace.remap[i] == i);
        result.step_log.push_back({global_step, ds.dataset_id, trace.loss, identity});
        if (config.refresh == FixedRefresh::kEveryNSteps &&
            global_step % config.refresh_every_n_steps == 0) {
          pair.fixed = pair.learnable;
        }
      }
    }

    PgtEpochTrace epoch_trace;
    epoch_trace.epoch = epoch + 1;
    double acc_sum = 0.0, sil_sum = 0.0;
    std::size_t counted = 0;
    for (const auto& ds : datasets) {
      if (ds.heldout_rows.rows() <= ds.k) continue;
      acc_sum += heldout_accuracy(pair.learnable, ds, eval_rng);
      sil_sum += heldout_silhouette(pair.learnable, ds, eval_rng);
      ++counted;
    }
    if (counted > 0) {
      epoch_trace.heldout_acc = acc_sum / static_cast<double>(counted);
      epoch_trace.heldout_silhouette = sil_sum / static_cast<double>(counted);
    }
    result.epoch_trace.push_back(epoch_trace);
    IF_LOG_INFO("pgt epoch " << epoch + 1 << "/" << config.epochs
                             << " heldout_acc=" << epoch_trace.heldout_acc);

    if (config.refresh == FixedRefresh::kPerEpoch) pair.fixed = pair.learnable;
  }

  result.head = std::move(pair.learnable);
  result.head.view_id = "PGT";
  return result;
}

void save_pgt_step_log_csv(const std::vector<PgtStepLog>& log, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write step log: " + path);
  os << "step,dataset_id,loss,remap_is_identity\n";
  for (const auto& entry : log) {
    os << entry.step << "," << entry.dataset_id << "," << nlohmann::json(entry.loss).dump() << ","
       << (entry.remap_is_identity ? 1 : 0) << "\n";
  }
}

}  // namespace intentforge
