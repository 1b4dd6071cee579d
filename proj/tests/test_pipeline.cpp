// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/errors.hpp"
#include "core/fixture_gen.hpp"
#include "core/mdb_train.hpp"
#include "core/pgt_train.hpp"
#include "core/pipeline.hpp"
#include "helpers.hpp"

using intentforge::AlignmentMode;
using intentforge::ConfigError;
using intentforge::FixtureConfig;
using intentforge::FixturePaths;
using intentforge::PipelineConfig;
using intentforge::Rng;
using intentforge::RunReport;
using intentforge::ValidationError;

namespace {

// The fixture + induction pair behind the golden-report and determinism
// tests. Everything is pinned: seeds, sizes, search range.
FixturePaths reference_fixture(const std::filesystem::path& dir) {
  FixtureConfig cfg;
  cfg.out_dir = dir.string();
  cfg.shape = "blobs";
  cfg.dim = 4;
  cfg.separation = 12.0;
  cfg.cluster_sigma = 0.8;
  intentforge::FixtureDatasetSpec spec;
  spec.dataset_id = "alpha";
  spec.num_intents = 3;
  spec.utterances_per_intent = 12;
  spec.test_per_intent = 4;
  cfg.datasets = {spec};
  return intentforge::generate_fixture(cfg, 7);
}

RunReport reference_induce(const FixturePaths& paths, const std::filesystem::path& out_dir) {
  PipelineConfig cfg;
  cfg.view_ge = true;
  cfg.view_mdb = false;
  cfg.view_pgt = false;
  cfg.k_search.k_min = 2;
  cfg.k_search.k_max = 6;
  cfg.k_search.trials = 5;
  cfg.n_init = 4;
  cfg.train_corpus = paths.dialogue_files.at(0);
  cfg.test_corpus = paths.test_file;
  cfg.embeddings_path = paths.embeddings_file;
  cfg.out_dir = out_dir.string();
  cfg.rng_seed = 11;
  return intentforge::induce(cfg);
}

// References file with four labeled utterances (gold a, a, b, b).
std::string write_tiny_references(const std::filesystem::path& dir) {
  std::string content;
  const char* golds[4] = {"a", "a", "b", "b"};
  for (int i = 0; i < 4; ++i) {
    content += std::string("{\"dialogue_id\":\"d") + std::to_string(i) +
               "\",\"turn_index\":0,\"utterance_id\":\"u" + std::to_string(i) +
               "\",\"text\":\"t\",\"speaker_role\":\"customer\",\"acts\":[\"InformIntent\"]," +
               "\"intent\":\"" + golds[i] + "\",\"dataset_id\":\"d\"}\n";
  }
  const auto path = dir / "refs.jsonl";
  testutil::write_file(path, content);
  return path.string();
}

std::string write_predictions(const std::filesystem::path& dir, const std::string& name,
                              const std::vector<std::pair<std::string, int>>& rows) {
  std::string content;
  for (const auto& [id, cluster] : rows) {
    content += "{\"utterance_id\":\"" + id +
               "\",\"predicted_cluster\":" + std::to_string(cluster) + "}\n";
  }
  const auto path = dir / name;
  testutil::write_file(path, content);
  return path.string();
}

}  // namespace

TEST_CASE("induction report matches the committed golden file byte for byte") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const FixturePaths paths = reference_fixture(dir / "fixture");
  reference_induce(paths, dir / "run");
  const std::string produced = testutil::read_file(dir / "run" / "report.json");
  const std::string golden =
      testutil::read_file(std::filesystem::path(INTENTFORGE_SOURCE_DIR) / "tests" / "data" /
                          "golden_report.json");
  CHECK(produced == golden);
}

TEST_CASE("running the same induction twice is bit-identical") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const FixturePaths paths = reference_fixture(dir / "fixture");
  const RunReport a = reference_induce(paths, dir / "run_a");
  const RunReport b = reference_induce(paths, dir / "run_b");
  CHECK(a.to_json() == b.to_json());
  CHECK(testutil::read_file(dir / "run_a" / "report.json") ==
        testutil::read_file(dir / "run_b" / "report.json"));
  CHECK(testutil::read_file(dir / "run_a" / "schema.jsonl") ==
        testutil::read_file(dir / "run_b" / "schema.jsonl"));
  CHECK(testutil::read_file(dir / "run_a" / "predictions.jsonl") ==
        testutil::read_file(dir / "run_b" / "predictions.jsonl"));
}

TEST_CASE("induction recovers the planted schema") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const FixturePaths paths = reference_fixture(dir / "fixture");
  const RunReport report = reference_induce(paths, dir / "run");
  CHECK(report.induced_k == 3);
  REQUIRE(report.train_metrics.has_value());
  CHECK(report.train_metrics->acc == doctest::Approx(1.0));
  REQUIRE(report.test_metrics.has_value());
  CHECK(report.test_metrics->acc == doctest::Approx(1.0));
}

TEST_CASE("induction artifacts reload cleanly") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const FixturePaths paths = reference_fixture(dir / "fixture");
  reference_induce(paths, dir / "run");

  const auto clf = intentforge::load_classifier((dir / "run" / "classifier.json").string());
  CHECK(clf.class_ids.size() == 3);
  CHECK(clf.weights.cols() == 4);  // GE view only, fixture dim

  const std::string schema = testutil::read_file(dir / "run" / "schema.jsonl");
  CHECK(std::count(schema.begin(), schema.end(), '\n') == 36);  // 3 intents x 12 train

  const std::string scores = testutil::read_file(dir / "run" / "score_table.csv");
  CHECK(scores.rfind("K,silhouette\n", 0) == 0);

  const std::string timings = testutil::read_file(dir / "run" / "timings.json");
  CHECK(timings.find("cluster") != std::string::npos);
}

TEST_CASE("config validation: views, checkpoints, required paths") {
  CHECK_THROWS_AS(PipelineConfig::from_json(
                      R"({"views":"FFF","train_corpus":"a","embeddings":"b","out_dir":"c"})", 0),
                  ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json(
                      R"({"views":"TT","train_corpus":"a","embeddings":"b","out_dir":"c"})", 0),
                  ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json(
                      R"({"views":"TTF","train_corpus":"a","embeddings":"b","out_dir":"c"})", 0),
                  ConfigError);  // MDB view without a checkpoint
  CHECK_THROWS_AS(PipelineConfig::from_json(R"({"views":"TFF","embeddings":"b","out_dir":"c"})",
                                            0),
                  ConfigError);  // no train corpus
  CHECK_THROWS_AS(PipelineConfig::from_json("{nope", 0), ConfigError);
}

TEST_CASE("a missing checkpoint file is a configuration error") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const FixturePaths paths = reference_fixture(dir / "fixture");
  PipelineConfig cfg;
  cfg.view_ge = true;
  cfg.view_mdb = true;
  cfg.mdb_checkpoint = (dir / "missing.json").string();
  cfg.k_search.k_min = 2;
  cfg.k_search.k_max = 4;
  cfg.k_search.trials = 3;
  cfg.train_corpus = paths.dialogue_files.at(0);
  cfg.embeddings_path = paths.embeddings_file;
  cfg.out_dir = (dir / "run").string();
  CHECK_THROWS_AS(intentforge::induce(cfg), ConfigError);
}

TEST_CASE("spectral pipeline resolves rings that defeat kmeans") {
  const auto dir = testutil::make_temp_dir("pipeline");
  FixtureConfig fix;
  fix.out_dir = (dir / "fixture").string();
  fix.shape = "rings";
  fix.dim = 2;
  fix.ring_radii = {2.0, 5.0};
  fix.ring_points = 80;
  fix.ring_noise = 0.02;
  const FixturePaths paths = intentforge::generate_fixture(fix, 21);

  PipelineConfig cfg;
  cfg.view_ge = true;
  cfg.k_search.k_min = 2;
  cfg.k_search.k_max = 2;
  cfg.k_search.trials = 1;
  cfg.n_neighbors = 10;
  cfg.n_init = 10;
  cfg.train_corpus = paths.dialogue_files.at(0);
  cfg.embeddings_path = paths.embeddings_file;
  cfg.rng_seed = 5;

  cfg.clustering_method = intentforge::ClusteringMethod::kSpectral;
  cfg.out_dir = (dir / "spectral").string();
  const RunReport spectral = intentforge::induce(cfg);
  REQUIRE(spectral.train_metrics.has_value());
  CHECK(spectral.train_metrics->acc == doctest::Approx(1.0));

  cfg.clustering_method = intentforge::ClusteringMethod::kKmeans;
  cfg.out_dir = (dir / "kmeans").string();
  const RunReport km = intentforge::induce(cfg);
  REQUIRE(km.train_metrics.has_value());
  CHECK(km.train_metrics->acc <= 0.75);
}

TEST_CASE("all three views flow through training checkpoints into induction") {
  const auto dir = testutil::make_temp_dir("pipeline");
  FixtureConfig fix;
  fix.out_dir = (dir / "fixture").string();
  fix.dim = 4;
  fix.separation = 12.0;
  fix.cluster_sigma = 0.8;
  intentforge::FixtureDatasetSpec a, b;
  a.dataset_id = "alpha";
  a.num_intents = 3;
  a.utterances_per_intent = 12;
  b.dataset_id = "beta";
  b.num_intents = 3;
  b.utterances_per_intent = 12;
  fix.datasets = {a, b};
  const FixturePaths paths = intentforge::generate_fixture(fix, 31);

  const auto registry = intentforge::load_registry(paths.registry_file);
  const auto embeddings = intentforge::load_embeddings_jsonl(paths.embeddings_file);

  intentforge::MdbConfig mdb_cfg = intentforge::mdb_preset("desk");
  mdb_cfg.epochs = 3;
  mdb_cfg.hidden_dims = {8};
  mdb_cfg.output_dim = 4;
  Rng mdb_rng(32);
  const auto mdb = intentforge::train_mdb(mdb_cfg, registry, embeddings, mdb_rng);
  const auto mdb_path = (dir / "mdb.json").string();
  intentforge::save_head_checkpoint(mdb.head, mdb_path);

  intentforge::PgtConfig pgt_cfg = intentforge::pgt_preset("desk");
  pgt_cfg.epochs = 1;
  pgt_cfg.batch_size = 18;
  Rng pgt_rng(33);
  const auto pgt = intentforge::train_pgt(pgt_cfg, registry, mdb.head, embeddings, pgt_rng);
  const auto pgt_path = (dir / "pgt.json").string();
  intentforge::save_head_checkpoint(pgt.head, pgt_path);

  PipelineConfig cfg;
  cfg.view_ge = true;
  cfg.view_mdb = true;
  cfg.view_pgt = true;
  cfg.mdb_checkpoint = mdb_path;
  cfg.pgt_checkpoint = pgt_path;
  cfg.normalize_views = true;
  cfg.k_search.k_min = 2;
  cfg.k_search.k_max = 6;
  cfg.k_search.trials = 5;
  cfg.n_init = 4;
  cfg.train_corpus = paths.dialogue_files.at(0);
  cfg.embeddings_path = paths.embeddings_file;
  cfg.out_dir = (dir / "run_a").string();
  cfg.rng_seed = 34;
  const RunReport first = intentforge::induce(cfg);
  CHECK(first.induced_k >= 2);
  CHECK(first.induced_k <= 6);
  REQUIRE(first.train_metrics.has_value());

  cfg.out_dir = (dir / "run_b").string();
  const RunReport second = intentforge::induce(cfg);
  CHECK(first.to_json() == second.to_json());
}

TEST_CASE("evaluate: perfect predictions score one everywhere") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const std::string refs = write_tiny_references(dir);
  const std::string preds = write_predictions(
      dir, "preds.jsonl", {{"u0", 0}, {"u1", 0}, {"u2", 1}, {"u3", 1}});
  const auto m = intentforge::evaluate_files(preds, refs, AlignmentMode::kOneToOne);
  CHECK(m.acc == doctest::Approx(1.0));
  CHECK(m.nmi == doctest::Approx(1.0));
  CHECK(m.f1 == doctest::Approx(1.0));
}

TEST_CASE("evaluate: prediction file order does not matter") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const std::string refs = write_tiny_references(dir);
  const std::string in_order = write_predictions(
      dir, "a.jsonl", {{"u0", 0}, {"u1", 0}, {"u2", 1}, {"u3", 2}});
  const std::string shuffled = write_predictions(
      dir, "b.jsonl", {{"u3", 2}, {"u1", 0}, {"u0", 0}, {"u2", 1}});
  const auto ma = intentforge::evaluate_files(in_order, refs, AlignmentMode::kOneToOne);
  const auto mb = intentforge::evaluate_files(shuffled, refs, AlignmentMode::kOneToOne);
  CHECK(ma.acc == mb.acc);
  CHECK(ma.nmi == mb.nmi);
  CHECK(ma.f1 == mb.f1);
}

TEST_CASE("evaluate: overlapping strictly beats one-to-one on a surplus cluster") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const std::string refs = write_tiny_references(dir);
  // Two predicted clusters map onto reference 'b'; one stays unmatched under
  // the one-to-one rule but is absorbed by the overlapping rule.
  const std::string preds = write_predictions(
      dir, "preds.jsonl", {{"u0", 0}, {"u1", 0}, {"u2", 1}, {"u3", 2}});
  const auto one = intentforge::evaluate_files(preds, refs, AlignmentMode::kOneToOne);
  const auto over = intentforge::evaluate_files(preds, refs, AlignmentMode::kOverlapping);
  CHECK(one.acc == doctest::Approx(0.75));
  CHECK(over.acc == doctest::Approx(1.0));
  CHECK(over.acc > one.acc);
}

TEST_CASE("evaluate: a missing prediction names the utterance id") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const std::string refs = write_tiny_references(dir);
  const std::string preds = write_predictions(dir, "preds.jsonl",
                                              {{"u0", 0}, {"u1", 0}, {"u3", 1}});
  try {
    intentforge::evaluate_files(preds, refs, AlignmentMode::kOneToOne);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("u2") != std::string::npos);
  }
}

TEST_CASE("evaluate: malformed and duplicate prediction lines are rejected") {
  const auto dir = testutil::make_temp_dir("pipeline");
  const std::string refs = write_tiny_references(dir);

  testutil::write_file(dir / "bad.jsonl", "{broken\n");
  CHECK_THROWS_AS(
      intentforge::evaluate_files((dir / "bad.jsonl").string(), refs, AlignmentMode::kOneToOne),
      ValidationError);

  const std::string dup = write_predictions(dir, "dup.jsonl", {{"u0", 0}, {"u0", 1}});
  CHECK_THROWS_AS(intentforge::evaluate_files(dup, refs, AlignmentMode::kOneToOne),
                  ValidationError);
}
