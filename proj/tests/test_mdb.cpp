// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/mdb_train.hpp"
#include "core/numerics.hpp"
#include "helpers.hpp"

using intentforge::ConfigError;
using intentforge::DatasetRegistry;
using intentforge::DomainBatch;
using intentforge::EmbeddingTable;
using intentforge::Matrix;
using intentforge::MdbConfig;
using intentforge::ProjectionHead;
using intentforge::RegisteredDataset;
using intentforge::Rng;
using intentforge::UtteranceRecord;

namespace {

UtteranceRecord make_record(const std::string& uid, const std::string& intent,
                            const std::string& dataset) {
  UtteranceRecord rec;
  rec.utterance_id = uid;
  rec.text = "t";
  rec.acts = {"InformIntent"};
  rec.gold_intent = intent;
  rec.dataset_id = dataset;
  return rec;
}

// `domains` datasets x `intents` Gaussian class clusters in embedding space.
struct SeparableFixture {
  DatasetRegistry registry;
  EmbeddingTable embeddings;
};

SeparableFixture separable_fixture(std::size_t domains, std::size_t intents, std::size_t per_intent,
                                   std::size_t dim, std::uint64_t seed) {
  SeparableFixture fx;
  Rng rng(seed);
  for (std::size_t d = 0; d < domains; ++d) {
    const std::string dataset = "dom" + std::to_string(d);
    RegisteredDataset ds;
    for (std::size_t c = 0; c < intents; ++c) ds.labels.push_back("i" + std::to_string(c));
    for (std::size_t c = 0; c < intents; ++c) {
      for (std::size_t i = 0; i < per_intent; ++i) {
        const std::string uid = dataset + "-c" + std::to_string(c) + "-" + std::to_string(i);
        ds.records.push_back(make_record(uid, "i" + std::to_string(c), dataset));
        std::vector<double> v(dim);
        for (std::size_t k = 0; k < dim; ++k) {
          // Distinct center per (domain, intent), unit noise.
          v[k] = rng.next_gaussian();
        }
        v[(d * intents + c) % dim] += 8.0;
        fx.embeddings.add(uid, std::move(v));
      }
    }
    fx.registry.add(dataset, std::move(ds));
  }
  return fx;
}

DomainBatch single_batch(const DatasetRegistry& registry, std::size_t batch_size,
                         std::uint64_t seed) {
  Rng rng(seed);
  return intentforge::build_domain_batch(registry, batch_size, rng);
}

}  // namespace

TEST_CASE("presets") {
  const MdbConfig paper = intentforge::mdb_preset("paper");
  CHECK(paper.tau == doctest::Approx(0.05));
  CHECK(paper.batch_size == 64);
  CHECK(paper.learning_rate == doctest::Approx(5e-6));
  CHECK(paper.weight_decay == doctest::Approx(1e-2));
  CHECK(paper.warmup_fraction == doctest::Approx(0.1));
  CHECK(paper.epochs == 30);
  const MdbConfig desk = intentforge::mdb_preset("desk");
  CHECK(desk.learning_rate == doctest::Approx(1e-3));
  CHECK_THROWS_AS(intentforge::mdb_preset("bogus"), ConfigError);
}

TEST_CASE("cosine softmax: aligned representation at low temperature") {
  // h equals the true class weight, the other weight orthogonal.
  const Matrix weights(2, 2, {1.0, 0.0, 0.0, 1.0});
  std::vector<double> grad_h(2, 0.0);
  const std::vector<double> h = {1.0, 0.0};
  const double loss = intentforge::cosine_softmax_sample(h, weights, 0, 0.05, 1.0, grad_h,
                                                         nullptr);
  CHECK(loss == doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-6));
  CHECK(loss < 1e-8);
}

TEST_CASE("cosine softmax: equidistant representation gives ln L") {
  const Matrix weights(3, 3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
  std::vector<double> grad_h(3, 0.0);
  const std::vector<double> h = {1.0, 1.0, 1.0};
  const double loss = intentforge::cosine_softmax_sample(h, weights, 1, 0.05, 1.0, grad_h,
                                                         nullptr);
  CHECK(loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("batch loss gradients match finite differences") {
  auto fx = separable_fixture(2, 3, 6, 5, 77);
  Rng init_rng(5);
  ProjectionHead head = intentforge::init_head("MDB", 5, {4}, 3, init_rng);
  for (const auto& id : fx.registry.dataset_ids()) {
    intentforge::add_dataset_head(head, id, fx.registry.dataset(id).labels.size(), init_rng);
  }
  const DomainBatch batch = single_batch(fx.registry, 8, 9);

  const auto [loss, grads] = intentforge::cosine_softmax_loss(head, batch, fx.embeddings, 0.5);
  const std::vector<double> analytic = intentforge::flatten_gradients(grads, true);
  const std::vector<double> theta = intentforge::flatten_parameters(head, true);

  const auto f = [&](const std::vector<double>& t) {
    ProjectionHead probe = head;
    intentforge::unflatten_parameters(probe, t, true);
    return intentforge::cosine_softmax_loss(probe, batch, fx.embeddings, 0.5).first;
  };
  const std::vector<double> numeric = intentforge::finite_diff_gradient(f, theta, 1e-5);
  REQUIRE(numeric.size() == analytic.size());
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double denom = std::max({std::fabs(numeric[i]), std::fabs(analytic[i]), 1e-6});
    CHECK(std::fabs(numeric[i] - analytic[i]) / denom <= 1e-4);
  }
  CHECK(loss > 0.0);
}

TEST_CASE("loss is invariant to positive rescaling of an input embedding") {
  auto fx = separable_fixture(1, 2, 5, 4, 11);
  Rng init_rng(6);
  ProjectionHead head = intentforge::init_head("MDB", 4, {}, 4, init_rng);
  // Single linear layer: scaling the input scales h, cosine removes it only if
  // the layer is linear without bias; zero the bias to make it exact.
  for (auto& b : head.layers[0].bias) b = 0.0;
  intentforge::add_dataset_head(head, "dom0", 2, init_rng);

  const DomainBatch batch = single_batch(fx.registry, 3, 4);
  const double base = intentforge::cosine_softmax_loss(head, batch, fx.embeddings, 0.05).first;

  EmbeddingTable scaled;
  for (const auto& group : batch.groups) {
    for (const auto& [uid, idx] : group.samples) {
      if (scaled.has(uid)) continue;
      std::vector<double> v = fx.embeddings.at(uid);
      for (double& x : v) x *= 3.7;
      scaled.add(uid, std::move(v));
    }
  }
  const double rescaled = intentforge::cosine_softmax_loss(head, batch, scaled, 0.05).first;
  CHECK(std::fabs(base - rescaled) <= 1e-9);
}

TEST_CASE("samples of one dataset never touch another dataset's head") {
  auto fx = separable_fixture(2, 2, 6, 4, 13);
  Rng init_rng(7);
  ProjectionHead head = intentforge::init_head("MDB", 4, {3}, 3, init_rng);
  for (const auto& id : fx.registry.dataset_ids()) {
    intentforge::add_dataset_head(head, id, 2, init_rng);
  }
  // Batch containing only dom0 samples.
  DatasetRegistry only_first;
  only_first.add("dom0", fx.registry.dataset("dom0"));
  const DomainBatch batch = single_batch(only_first, 4, 3);
  const auto [loss, grads] = intentforge::cosine_softmax_loss(head, batch, fx.embeddings, 0.05);
  for (const double g : grads.dataset_heads.at("dom1").values()) CHECK(g == 0.0);
  bool any_nonzero = false;
  for (const double g : grads.dataset_heads.at("dom0").values()) any_nonzero |= (g != 0.0);
  CHECK(any_nonzero);
}

TEST_CASE("optimizer: zero gradient and zero weight decay is a fixpoint") {
  std::vector<double> params = {1.0, -2.0, 0.5};
  const std::vector<double> before = params;
  intentforge::OptimizerState state = intentforge::OptimizerState::zeros(3);
  intentforge::ScheduleConfig schedule;
  schedule.learning_rate = 1e-2;
  schedule.weight_decay = 0.0;
  schedule.total_steps = 10;
  const std::vector<double> grads(3, 0.0);
  intentforge::optimizer_step(state, params, grads, schedule);
  CHECK(params == before);
}

TEST_CASE("schedule hits the configured lr exactly at warmup end") {
  intentforge::ScheduleConfig schedule;
  schedule.learning_rate = 3e-4;
  schedule.warmup_fraction = 0.1;
  schedule.total_steps = 100;
  CHECK(intentforge::effective_lr(schedule, 10) == doctest::Approx(3e-4).epsilon(1e-15));
  CHECK(intentforge::effective_lr(schedule, 5) == doctest::Approx(1.5e-4));
  CHECK(intentforge::effective_lr(schedule, 100) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant gradient drives the parameter down monotonically early on") {
  std::vector<double> params = {0.0};
  intentforge::OptimizerState state = intentforge::OptimizerState::zeros(1);
  intentforge::ScheduleConfig schedule;
  schedule.learning_rate = 1e-2;
  schedule.weight_decay = 0.0;
  schedule.warmup_fraction = 0.0;
  schedule.total_steps = 1000;
  const std::vector<double> grads = {2.5};
  double previous = params[0];
  for (int i = 0; i < 50; ++i) {
    intentforge::optimizer_step(state, params, grads, schedule);
    CHECK(params[0] < previous);
    previous = params[0];
  }
}

TEST_CASE("zero-epoch training returns the initialization untouched") {
  auto fx = separable_fixture(2, 2, 8, 4, 21);
  MdbConfig config = intentforge::mdb_preset("desk");
  config.epochs = 0;
  config.hidden_dims = {4};
  config.output_dim = 3;

  Rng rng(33);
  const auto result = intentforge::train_mdb(config, fx.registry, fx.embeddings, rng);
  CHECK(result.trace.empty());

  // Replay the initialization stream to reconstruct the expected head.
  Rng replay(33);
  Rng init_rng(replay.fork_seed("mdb/init"));
  ProjectionHead expected = intentforge::init_head("MDB", 4, {4}, 3, init_rng);
  for (const auto& id : fx.registry.dataset_ids()) {
    intentforge::add_dataset_head(expected, id, fx.registry.dataset(id).labels.size(), init_rng);
  }
  REQUIRE(result.head.layers.size() == expected.layers.size());
  for (std::size_t i = 0; i < expected.layers.size(); ++i) {
    CHECK(result.head.layers[i].weight == expected.layers[i].weight);
    CHECK(result.head.layers[i].bias == expected.layers[i].bias);
  }
}

TEST_CASE("identical seeds give bit-identical loss traces") {
  auto fx = separable_fixture(2, 3, 10, 5, 55);
  MdbConfig config = intentforge::mdb_preset("desk");
  config.epochs = 3;
  config.batch_size = 8;
  config.hidden_dims = {6};
  config.output_dim = 4;

  Rng r1(101), r2(101);
  const auto a = intentforge::train_mdb(config, fx.registry, fx.embeddings, r1);
  const auto b = intentforge::train_mdb(config, fx.registry, fx.embeddings, r2);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].loss == b.trace[i].loss);
    CHECK(a.trace[i].lr == b.trace[i].lr);
  }
}

TEST_CASE("training a separable 3-domain fixture reaches 0.9 held-out accuracy") {
  auto fx = separable_fixture(3, 4, 30, 8, 99);
  MdbConfig config = intentforge::mdb_preset("desk");
  config.learning_rate = 1e-2;  // the tiny head tolerates a hot schedule
  config.epochs = 20;
  config.batch_size = 24;
  config.hidden_dims = {16};
  config.output_dim = 8;

  Rng rng(7);
  const auto result = intentforge::train_mdb(config, fx.registry, fx.embeddings, rng);
  REQUIRE(result.validation_accuracy.size() == 3);
  for (const auto& [id, acc] : result.validation_accuracy) {
    INFO("dataset " << id << " accuracy " << acc);
    CHECK(acc >= 0.9);
  }

  // Smoothed loss at the end must not exceed the start.
  const std::size_t window = std::min<std::size_t>(50, result.trace.size());
  double head_mean = 0.0, tail_mean = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    head_mean += result.trace[i].loss;
    tail_mean += result.trace[result.trace.size() - window + i].loss;
  }
  CHECK(tail_mean <= head_mean);
}

TEST_CASE("training refuses unembedded records") {
  auto fx = separable_fixture(1, 2, 4, 4, 3);
  RegisteredDataset ds = fx.registry.dataset("dom0");
  ds.records.push_back(make_record("ghost", "i0", "dom0"));
  DatasetRegistry broken;
  broken.add("dom0", std::move(ds));
  MdbConfig config = intentforge::mdb_preset("desk");
  Rng rng(1);
  CHECK_THROWS_AS(intentforge::train_mdb(config, broken, fx.embeddings, rng),
                  intentforge::ValidationError);
}

TEST_CASE("loss trace CSV format") {
  const auto dir = testutil::make_temp_dir("mdb");
  intentforge::save_loss_trace_csv({{1, 0.5, 1e-3}, {2, 0.25, 2e-3}},
                                   (dir / "trace.csv").string());
  const std::string csv = testutil::read_file(dir / "trace.csv");
  CHECK(csv.rfind("step,loss,lr\n", 0) == 0);
  CHECK(csv.find("1,0.5,0.001") != std::string::npos);
}
