// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_FIXTURE_GEN_HPP
#define INTENTFORGE_CORE_FIXTURE_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace intentforge {

// Synthetic corpora with controllable intent geometry, so every training and
// clustering mechanism is exercisable without proprietary data.
struct FixtureDatasetSpec {
  std::string dataset_id = "alpha";
  std::size_t num_intents = 4;
  std::size_t utterances_per_intent = 40;
  std::size_t noise_utterances = 0;   // extracted but unlabeled turns
  std::size_t test_per_intent = 0;    // emitted into the shared test file
};

struct FixtureConfig {
  std::string out_dir;
  std::string shape = "blobs";  // "blobs" or "rings"
  std::size_t dim = 8;
  std::vector<FixtureDatasetSpec> datasets = {FixtureDatasetSpec{}};

  // blobs: class centers spaced along axis 0, isotropic unit noise scaled by
  // cluster_sigma, optionally stretched along elongation_axis.
  double separation = 10.0;
  double cluster_sigma = 1.0;
  double elongation = 1.0;
  std::size_t elongation_axis = 1;

  // rings: one intent per radius, points on concentric circles in the first
  // two dimensions.
  std::vector<double> ring_radii = {2.0, 5.0};
  std::size_t ring_points = 100;
  std::size_t ring_test_points = 0;
  double ring_noise = 0.02;
};

struct FixturePaths {
  std::vector<std::string> dialogue_files;  // one per dataset, registry order
  std::string test_file;
  std::string embeddings_file;
  std::string registry_file;
};

// Writes <id>_dialogues.jsonl per dataset, test_utterances.jsonl,
// embeddings.jsonl and registry.json under out_dir.
FixturePaths generate_fixture(const FixtureConfig& config, std::uint64_t seed);

FixtureConfig fixture_config_from_json(const std::string& json_text);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_FIXTURE_GEN_HPP
