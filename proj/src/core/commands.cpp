// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/commands.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/corpus.hpp"
#include "core/embeddings.hpp"
#include "core/errors.hpp"
#include "core/fixture_gen.hpp"
#include "core/log.hpp"
#include "core/mdb_train.hpp"
#include "core/pgt_train.hpp"
#include "core/pipeline.hpp"
#include "core/views.hpp"

namespace intentforge {

namespace {

nlohmann::json parse_config(const std::string& text, const std::string& command) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(command + " config is not valid JSON: " + std::string(e.what()));
  }
}

std::string require_string(const nlohmann::json& j, const std::string& key,
                           const std::string& command) {
  if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
    throw ConfigError(command + ": '" + key + "' (string) is required");
  }
  return j.at(key).get<std::string>();
}

MdbConfig mdb_config_from_json(const nlohmann::json& j, std::uint64_t seed) {
  MdbConfig cfg = mdb_preset(j.value("preset", "paper"));
  cfg.tau = j.value("tau", cfg.tau);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.warmup_fraction = j.value("warmup_fraction", cfg.warmup_fraction);
  if (j.contains("iterations_per_epoch")) {
    cfg.iterations_per_epoch_rule = IterationRule::kExplicit;
    cfg.explicit_iterations = j.at("iterations_per_epoch").get<std::size_t>();
  }
  if (j.contains("hidden_dims")) {
    cfg.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
  }
  cfg.output_dim = j.value("output_dim", cfg.output_dim);
  cfg.rng_seed = seed;
  cfg.validate();
  return cfg;
}

PgtConfig pgt_config_from_json(const nlohmann::json& j, std::uint64_t seed) {
  PgtConfig cfg = pgt_preset(j.value("preset", "paper"));
  cfg.tau_pgt = j.value("tau_pgt", cfg.tau_pgt);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.warmup_fraction = j.value("warmup_fraction", cfg.warmup_fraction);
  cfg.kmeans_n_init = j.value("kmeans_n_init", cfg.kmeans_n_init);
  if (j.contains("fixed_refresh")) {
    const std::string r = j.at("fixed_refresh").get<std::string>();
    if (r == "never") {
      cfg.refresh = FixedRefresh::kNever;
    } else if (r == "per_epoch") {
      cfg.refresh = FixedRefresh::kPerEpoch;
    } else if (r == "every_n_steps") {
      cfg.refresh = FixedRefresh::kEveryNSteps;
      cfg.refresh_every_n_steps = j.value("refresh_every_n_steps", std::size_t{0});
    } else {
      throw ConfigError("train-pgt: fixed_refresh must be never, per_epoch or every_n_steps");
    }
  }
  cfg.rng_seed = seed;
  cfg.validate();
  return cfg;
}

}  // namespace

std::string run_gen_fixture(const std::string& config_json, std::uint64_t seed) {
  FixtureConfig cfg = fixture_config_from_json(config_json);
  const FixturePaths paths = generate_fixture(cfg, seed);
  nlohmann::ordered_json out;
  out["dialogue_files"] = paths.dialogue_files;
  out["test_file"] = paths.test_file;
  out["embeddings_file"] = paths.embeddings_file;
  out["registry_file"] = paths.registry_file;
  return out.dump(2) + "\n";
}

std::string run_extract(const std::string& config_json, std::uint64_t) {
  const nlohmann::json j = parse_config(config_json, "extract");
  const std::string input = require_string(j, "input", "extract");
  const std::string out_path = require_string(j, "out", "extract");
  const DialogueSet dialogues = load_dialogues(input);
  const std::vector<UtteranceRecord> records = extract_intent_utterances(dialogues);
  save_utterances_jsonl(records, out_path);
  nlohmann::ordered_json out;
  out["dialogues"] = dialogues.n();
  out["turns"] = dialogues.record_count();
  out["extracted"] = records.size();
  out["out"] = out_path;
  return out.dump(2) + "\n";
}

std::string run_train_mdb(const std::string& config_json, std::uint64_t seed) {
  const nlohmann::json j = parse_config(config_json, "train-mdb");
  const MdbConfig cfg = mdb_config_from_json(j, seed);
  const std::string registry_path = require_string(j, "registry", "train-mdb");
  const std::string embeddings_path = require_string(j, "embeddings", "train-mdb");
  const std::string out_path = require_string(j, "out", "train-mdb");
  const std::string trace_path = j.value("trace_out", "");

  const DatasetRegistry registry = load_registry(registry_path);
  const EmbeddingTable table = load_embeddings_jsonl(embeddings_path);
  Rng rng(derive_seed(seed, "train-mdb"));
  const MdbTrainResult result = train_mdb(cfg, registry, table, rng);
  save_head_checkpoint(result.head, out_path);
  if (!trace_path.empty()) save_loss_trace_csv(result.trace, trace_path);

  nlohmann::ordered_json out;
  out["checkpoint"] = out_path;
  out["steps"] = result.trace.size();
  out["final_loss"] = result.trace.empty() ? 0.0 : result.trace.back().loss;
  nlohmann::ordered_json acc = nlohmann::ordered_json::object();
  for (const auto& [id, a] : result.validation_accuracy) acc[id] = a;
  out["validation_accuracy"] = acc;
  return out.dump(2) + "\n";
}

std::string run_train_pgt(const std::string& config_json, std::uint64_t seed) {
  const nlohmann::json j = parse_config(config_json, "train-pgt");
  const PgtConfig cfg = pgt_config_from_json(j, seed);
  const std::string registry_path = require_string(j, "registry", "train-pgt");
  const std::string embeddings_path = require_string(j, "embeddings", "train-pgt");
  const std::string mdb_path = require_string(j, "mdb_checkpoint", "train-pgt");
  const std::string out_path = require_string(j, "out", "train-pgt");
  const std::string step_log_path = j.value("step_log_out", "");

  const DatasetRegistry registry = load_registry(registry_path);
  const EmbeddingTable table = load_embeddings_jsonl(embeddings_path);
  const ProjectionHead mdb_head = load_head_checkpoint(mdb_path);
  Rng rng(derive_seed(seed, "train-pgt"));
  const PgtTrainResult result = train_pgt(cfg, registry, mdb_head, table, rng);
  save_head_checkpoint(result.head, out_path);
  if (!step_log_path.empty()) save_pgt_step_log_csv(result.step_log, step_log_path);

  nlohmann::ordered_json out;
  out["checkpoint"] = out_path;
  out["steps"] = result.step_log.size();
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  for (const auto& e : result.epoch_trace) {
    epochs.push_back({{"epoch", e.epoch},
                      {"heldout_acc", e.heldout_acc},
                      {"heldout_silhouette", e.heldout_silhouette}});
  }
  out["epochs"] = epochs;
  return out.dump(2) + "\n";
}

std::string run_induce(const std::string& config_json, std::uint64_t seed) {
  const PipelineConfig cfg = PipelineConfig::from_json(config_json, seed);
  const RunReport report = induce(cfg);
  return report.to_json();
}

std::string run_evaluate(const std::string& config_json, std::uint64_t) {
  const nlohmann::json j = parse_config(config_json, "evaluate");
  const std::string predictions = require_string(j, "predictions", "evaluate");
  const std::string references = require_string(j, "references", "evaluate");
  AlignmentMode mode = AlignmentMode::kOneToOne;
  if (j.contains("alignment_mode")) {
    const std::string m = j.at("alignment_mode").get<std::string>();
    if (m == "one_to_one") {
      mode = AlignmentMode::kOneToOne;
    } else if (m == "overlapping") {
      mode = AlignmentMode::kOverlapping;
    } else {
      throw ConfigError("evaluate: alignment_mode must be 'one_to_one' or 'overlapping'");
    }
  }
  const MetricsReport metrics = evaluate_files(predictions, references, mode);
  std::string text = metrics.to_json();
  if (j.contains("out")) {
    const std::string out_path = j.at("out").get<std::string>();
    std::ofstream os(out_path);
    if (!os) throw ConfigError("evaluate: cannot write " + out_path);
    os << text;
  }
  return text;
}

}  // namespace intentforge
