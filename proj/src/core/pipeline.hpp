// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_PIPELINE_HPP
#define INTENTFORGE_CORE_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/clustering.hpp"
#include "core/metrics.hpp"

namespace intentforge {

// End-to-end induction run: extract, forward enabled views, compose, estimate
// K, cluster, train the schema classifier, predict and evaluate.
struct PipelineConfig {
  bool view_ge = true;    // paper's T/F notation, GE-MDB-PGT order
  bool view_mdb = false;
  bool view_pgt = false;
  ClusteringMethod clustering_method = ClusteringMethod::kKmeans;
  KSearchConfig k_search;
  std::size_t n_neighbors = 10;
  std::size_t n_init = 10;
  AlignmentMode alignment_mode = AlignmentMode::kOneToOne;
  bool normalize_views = false;
  std::string train_corpus;
  std::string test_corpus;  // optional
  std::string embeddings_path;
  std::string mdb_checkpoint;  // required when view_mdb
  std::string pgt_checkpoint;  // required when view_pgt
  std::string out_dir;
  std::uint64_t rng_seed = 0;

  void validate() const;
  static PipelineConfig from_json(const std::string& json_text, std::uint64_t seed);
  std::string view_mask() const;  // e.g. "TTF"
};

struct RunReport {
  std::size_t induced_k = 0;
  std::string schema_path;
  std::optional<MetricsReport> train_metrics;
  std::optional<MetricsReport> test_metrics;
  std::vector<std::pair<std::size_t, double>> score_table;
  std::string config_echo;  // normalized config JSON
  std::map<std::string, double> timings_seconds;

  // Deterministic part only; timings go to a sibling file.
  std::string to_json() const;
  std::string timings_json() const;
};

RunReport induce(const PipelineConfig& config);

// Joins predictions ({"utterance_id","predicted_cluster"} JSONL) with
// references (dialogue-format JSONL carrying gold intents) by utterance_id.
MetricsReport evaluate_files(const std::string& predictions_path,
                             const std::string& references_path, AlignmentMode mode);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_PIPELINE_HPP
