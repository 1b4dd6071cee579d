// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/fixture_gen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/corpus.hpp"
#include "core/embeddings.hpp"
#include "core/errors.hpp"
#include "core/log.hpp"

namespace intentforge {

namespace {

struct GeneratedUtterance {
  UtteranceRecord record;
  std::vector<double> vector;
  bool is_test = false;
};

std::vector<double> blob_point(std::size_t intent, const FixtureConfig& cfg, Rng& rng) {
  std::vector<double> v(cfg.dim, 0.0);
  for (std::size_t d = 0; d < cfg.dim; ++d) v[d] = cfg.cluster_sigma * rng.next_gaussian();
  if (cfg.elongation != 1.0 && cfg.elongation_axis < cfg.dim) {
    v[cfg.elongation_axis] *= cfg.elongation;
  }
  v[0] += static_cast<double>(intent) * cfg.separation;
  return v;
}

std::vector<double> ring_point(std::size_t intent, const FixtureConfig& cfg, Rng& rng) {
  if (cfg.dim < 2) throw ConfigError("gen-fixture: rings need dim >= 2");
  std::vector<double> v(cfg.dim, 0.0);
  const double angle = 2.0 * M_PI * rng.next_double();
  const double r = cfg.ring_radii.at(intent) + cfg.ring_noise * rng.next_gaussian();
  v[0] = r * std::cos(angle);
  v[1] = r * std::sin(angle);
  for (std::size_t d = 2; d < cfg.dim; ++d) v[d] = cfg.ring_noise * rng.next_gaussian();
  return v;
}

std::string intent_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "intent_%02zu", i);
  return buf;
}

// Wraps utterances into two-turn dialogues (agent prompt without
// InformIntent, then the customer turn) so extraction has something to
// filter out.
void write_dialogue_file(const std::vector<const GeneratedUtterance*>& utterances,
                         const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write fixture file: " + path);
  std::size_t dialogue_no = 0;
  for (const auto* u : utterances) {
    const std::string dialogue_id = u->record.dataset_id + "-d" + std::to_string(dialogue_no++);
    nlohmann::ordered_json agent;
    agent["dialogue_id"] = dialogue_id;
    agent["turn_index"] = 0;
    agent["utterance_id"] = u->record.utterance_id + "-agent";
    agent["text"] = "How can I help you today?";
    agent["speaker_role"] = "agent";
    agent["acts"] = nlohmann::json::array();
    agent["intent"] = nullptr;
    agent["dataset_id"] = u->record.dataset_id;
    os << agent.dump() << "\n";

    nlohmann::ordered_json turn;
    turn["dialogue_id"] = dialogue_id;
    turn["turn_index"] = 1;
    turn["utterance_id"] = u->record.utterance_id;
    turn["text"] = u->record.text;
    turn["speaker_role"] = "customer";
    turn["acts"] = nlohmann::json::array({"InformIntent"});
    turn["intent"] = u->record.gold_intent ? nlohmann::ordered_json(*u->record.gold_intent)
                                           : nlohmann::ordered_json(nullptr);
    turn["dataset_id"] = u->record.dataset_id;
    os << turn.dump() << "\n";
  }
}

}  // namespace

FixturePaths generate_fixture(const FixtureConfig& config, std::uint64_t seed) {
  if (config.out_dir.empty()) throw ConfigError("gen-fixture: out_dir is required");
  if (config.shape != "blobs" && config.shape != "rings") {
    throw ConfigError("gen-fixture: shape must be 'blobs' or 'rings'");
  }
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path out(config.out_dir);

  Rng rng(derive_seed(seed, "gen-fixture"));
  std::vector<std::vector<GeneratedUtterance>> per_dataset;

  for (const auto& spec : config.datasets) {
    std::vector<GeneratedUtterance> utterances;
    const std::size_t num_intents =
        config.shape == "rings" ? config.ring_radii.size() : spec.num_intents;
    const std::size_t per_intent =
        config.shape == "rings" ? config.ring_points : spec.utterances_per_intent;
    const std::size_t test_per_intent =
        config.shape == "rings" ? config.ring_test_points : spec.test_per_intent;
    std::size_t counter = 0;

    const auto make = [&](std::size_t intent, bool labeled, bool is_test) {
      GeneratedUtterance u;
      u.record.dataset_id = spec.dataset_id;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "-u%05zu", counter++);
      u.record.utterance_id = spec.dataset_id + buf;
      u.record.speaker_role = SpeakerRole::kCustomer;
      u.record.acts.insert("InformIntent");
      if (labeled) {
        u.record.gold_intent = intent_name(intent);
        u.record.text = "synthetic request expressing " + intent_name(intent);
      } else {
        u.record.text = "synthetic chatter without any intent";
      }
      u.vector = config.shape == "rings" ? ring_point(intent, config, rng)
                                         : blob_point(intent, config, rng);
      u.is_test = is_test;
      return u;
    };

    for (std::size_t intent = 0; intent < num_intents; ++intent) {
      for (std::size_t i = 0; i < per_intent; ++i) {
        utterances.push_back(make(intent, true, false));
      }
      for (std::size_t i = 0; i < test_per_intent; ++i) {
        utterances.push_back(make(intent, true, true));
      }
    }
    for (std::size_t i = 0; i < spec.noise_utterances; ++i) {
      // Noise points are drawn from a random intent's geometry but carry no
      // gold label.
      const std::size_t intent = static_cast<std::size_t>(rng.next_below(num_intents));
      utterances.push_back(make(intent, false, false));
    }
    per_dataset.push_back(std::move(utterances));
  }

  FixturePaths paths;
  paths.test_file = (out / "test_utterances.jsonl").string();
  paths.embeddings_file = (out / "embeddings.jsonl").string();
  paths.registry_file = (out / "registry.json").string();

  EmbeddingTable table;
  std::vector<std::string> embedding_order;
  std::vector<const GeneratedUtterance*> test_utterances;
  nlohmann::ordered_json registry = nlohmann::ordered_json::object();

  for (std::size_t k = 0; k < config.datasets.size(); ++k) {
    const auto& spec = config.datasets[k];
    const std::string dialogue_path = (out / (spec.dataset_id + "_dialogues.jsonl")).string();
    std::vector<const GeneratedUtterance*> train;
    for (const auto& u : per_dataset[k]) {
      table.add(u.record.utterance_id, u.vector);
      embedding_order.push_back(u.record.utterance_id);
      (u.is_test ? test_utterances : train).push_back(&u);
    }
    write_dialogue_file(train, dialogue_path);
    paths.dialogue_files.push_back(dialogue_path);

    const std::size_t num_intents =
        config.shape == "rings" ? config.ring_radii.size() : spec.num_intents;
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < num_intents; ++i) labels.push_back(intent_name(i));
    registry[spec.dataset_id] = {{"path", dialogue_path}, {"labels", labels}};
  }

  write_dialogue_file(test_utterances, paths.test_file);
  save_embeddings_jsonl(table, embedding_order, paths.embeddings_file);
  {
    std::ofstream os(paths.registry_file);
    if (!os) throw ConfigError("cannot write registry: " + paths.registry_file);
    os << registry.dump(2) << "\n";
  }
  IF_LOG_INFO("fixture written under " << config.out_dir);
  return paths;
}

FixtureConfig fixture_config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("gen-fixture config is not valid JSON: " + std::string(e.what()));
  }
  FixtureConfig config;
  config.out_dir = j.value("out_dir", "");
  config.shape = j.value("shape", config.shape);
  config.dim = j.value("dim", config.dim);
  config.separation = j.value("separation", config.separation);
  config.cluster_sigma = j.value("cluster_sigma", config.cluster_sigma);
  config.elongation = j.value("elongation", config.elongation);
  config.elongation_axis = j.value("elongation_axis", config.elongation_axis);
  if (j.contains("ring_radii")) config.ring_radii = j.at("ring_radii").get<std::vector<double>>();
  config.ring_points = j.value("ring_points", config.ring_points);
  config.ring_test_points = j.value("ring_test_points", config.ring_test_points);
  config.ring_noise = j.value("ring_noise", config.ring_noise);
  if (j.contains("datasets")) {
    config.datasets.clear();
    for (const auto& d : j.at("datasets")) {
      FixtureDatasetSpec spec;
      spec.dataset_id = d.value("dataset_id", spec.dataset_id);
      spec.num_intents = d.value("num_intents", spec.num_intents);
      spec.utterances_per_intent = d.value("utterances_per_intent", spec.utterances_per_intent);
      spec.noise_utterances = d.value("noise_utterances", spec.noise_utterances);
      spec.test_per_intent = d.value("test_per_intent", spec.test_per_intent);
      config.datasets.push_back(spec);
    }
  }
  return config;
}

}  // namespace intentforge
