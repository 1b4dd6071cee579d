// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "core/classifier.hpp"
#include "core/corpus.hpp"
#include "core/embeddings.hpp"
#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/views.hpp"

namespace intentforge {

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink, std::string name)
      : sink_(sink), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    sink_[name_] = std::chrono::duration<double>(elapsed).count();
  }

 private:
  std::map<std::string, double>& sink_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

ClusteringMethod parse_method(const std::string& s) {
  if (s == "kmeans") return ClusteringMethod::kKmeans;
  if (s == "spectral") return ClusteringMethod::kSpectral;
  throw ConfigError("clustering_method must be 'kmeans' or 'spectral', got '" + s + "'");
}

AlignmentMode parse_alignment(const std::string& s) {
  if (s == "one_to_one") return AlignmentMode::kOneToOne;
  if (s == "overlapping") return AlignmentMode::kOverlapping;
  throw ConfigError("alignment_mode must be 'one_to_one' or 'overlapping', got '" + s + "'");
}

// Integer reference ids for gold intent strings, assigned in sorted order so
// the encoding does not depend on record order.
std::vector<int> encode_references(const std::vector<const UtteranceRecord*>& labeled) {
  std::map<std::string, int> ids;
  for (const auto* r : labeled) ids.emplace(*r->gold_intent, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  std::vector<int> out;
  out.reserve(labeled.size());
  for (const auto* r : labeled) out.push_back(ids.at(*r->gold_intent));
  return out;
}

// GE / MDB / PGT column blocks for one base-embedding matrix.
MultiViewEmbedding forward_views(const PipelineConfig& cfg, const Matrix& base,
                                 const ProjectionHead* mdb_head, const ProjectionHead* pgt_head) {
  Matrix z1, z2, z3;
  if (cfg.view_ge) z1 = base;
  if (cfg.view_mdb) z2 = head_forward(*mdb_head, base);
  if (cfg.view_pgt) z3 = head_forward(*pgt_head, base);
  if (cfg.normalize_views) {
    if (!z1.empty()) z1 = normalize_rows(z1);
    if (!z2.empty()) z2 = normalize_rows(z2);
    if (!z3.empty()) z3 = normalize_rows(z3);
  }
  return compose_views(z1, z2, z3);
}

nlohmann::ordered_json metrics_to_ordered(const MetricsReport& m) {
  return nlohmann::ordered_json::parse(m.to_json());
}

}  // namespace

void PipelineConfig::validate() const {
  if (!view_ge && !view_mdb && !view_pgt) {
    throw ConfigError("induce: at least one view must be enabled");
  }
  if (train_corpus.empty()) throw ConfigError("induce: train_corpus is required");
  if (embeddings_path.empty()) throw ConfigError("induce: embeddings is required");
  if (out_dir.empty()) throw ConfigError("induce: out_dir is required");
  if (view_mdb && mdb_checkpoint.empty()) {
    throw ConfigError("induce: mdb_checkpoint is required when the MDB view is enabled");
  }
  if (view_pgt && pgt_checkpoint.empty()) {
    throw ConfigError("induce: pgt_checkpoint is required when the PGT view is enabled");
  }
  if (n_init < 1) throw ConfigError("induce: n_init must be at least 1");
}

std::string PipelineConfig::view_mask() const {
  std::string mask;
  mask += view_ge ? 'T' : 'F';
  mask += view_mdb ? 'T' : 'F';
  mask += view_pgt ? 'T' : 'F';
  return mask;
}

PipelineConfig PipelineConfig::from_json(const std::string& json_text, std::uint64_t seed) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("induce config is not valid JSON: " + std::string(e.what()));
  }
  PipelineConfig cfg;
  cfg.rng_seed = seed;
  if (j.contains("views")) {
    const std::string mask = j.at("views").get<std::string>();
    if (mask.size() != 3 || mask.find_first_not_of("TF") != std::string::npos) {
      throw ConfigError("views must be a 3-char T/F mask in GE,MDB,PGT order");
    }
    cfg.view_ge = mask[0] == 'T';
    cfg.view_mdb = mask[1] == 'T';
    cfg.view_pgt = mask[2] == 'T';
  }
  if (j.contains("clustering_method")) {
    cfg.clustering_method = parse_method(j.at("clustering_method").get<std::string>());
  }
  if (j.contains("k_search")) {
    const auto& ks = j.at("k_search");
    cfg.k_search.k_min = ks.value("k_min", cfg.k_search.k_min);
    cfg.k_search.k_max = ks.value("k_max", cfg.k_search.k_max);
    cfg.k_search.trials = ks.value("trials", cfg.k_search.trials);
  }
  cfg.n_neighbors = j.value("n_neighbors", cfg.n_neighbors);
  cfg.n_init = j.value("n_init", cfg.n_init);
  if (j.contains("alignment_mode")) {
    cfg.alignment_mode = parse_alignment(j.at("alignment_mode").get<std::string>());
  }
  cfg.normalize_views = j.value("normalize_views", cfg.normalize_views);
  cfg.train_corpus = j.value("train_corpus", "");
  cfg.test_corpus = j.value("test_corpus", "");
  cfg.embeddings_path = j.value("embeddings", "");
  cfg.mdb_checkpoint = j.value("mdb_checkpoint", "");
  cfg.pgt_checkpoint = j.value("pgt_checkpoint", "");
  cfg.out_dir = j.value("out_dir", "");
  cfg.validate();
  return cfg;
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(config_echo);
  j["induced_k"] = induced_k;
  j["schema_path"] = schema_path;
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& [k, s] : score_table) table.push_back({{"K", k}, {"silhouette", s}});
  j["score_table"] = table;
  j["train_metrics"] =
      train_metrics ? metrics_to_ordered(*train_metrics) : nlohmann::ordered_json(nullptr);
  j["test_metrics"] =
      test_metrics ? metrics_to_ordered(*test_metrics) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string RunReport::timings_json() const {
  nlohmann::ordered_json j;
  for (const auto& [name, seconds] : timings_seconds) j[name] = seconds;
  return j.dump(2) + "\n";
}

RunReport induce(const PipelineConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path out(config.out_dir);

  RunReport report;
  {
    nlohmann::ordered_json echo;
    echo["views"] = config.view_mask();
    echo["clustering_method"] =
        config.clustering_method == ClusteringMethod::kKmeans ? "kmeans" : "spectral";
    echo["k_search"] = {{"k_min", config.k_search.k_min},
                        {"k_max", config.k_search.k_max},
                        {"trials", config.k_search.trials}};
    echo["n_neighbors"] = config.n_neighbors;
    echo["n_init"] = config.n_init;
    echo["alignment_mode"] =
        config.alignment_mode == AlignmentMode::kOneToOne ? "one_to_one" : "overlapping";
    echo["normalize_views"] = config.normalize_views;
    echo["seed"] = config.rng_seed;
    report.config_echo = echo.dump();
  }

  std::vector<UtteranceRecord> records;
  EmbeddingTable table;
  {
    StageTimer t(report.timings_seconds, "load");
    const DialogueSet dialogues = load_dialogues(config.train_corpus);
    records = extract_intent_utterances(dialogues);
    if (records.empty()) throw ValidationError("induce: no InformIntent utterances in corpus");
    table = load_embeddings_jsonl(config.embeddings_path);
  }

  const ProjectionHead mdb_head =
      config.view_mdb ? load_head_checkpoint(config.mdb_checkpoint) : ProjectionHead{};
  const ProjectionHead pgt_head =
      config.view_pgt ? load_head_checkpoint(config.pgt_checkpoint) : ProjectionHead{};

  MultiViewEmbedding mv;
  {
    StageTimer t(report.timings_seconds, "views");
    const Matrix base = table.gather_records(records);
    mv = forward_views(config, base, &mdb_head, &pgt_head);
  }
  const Matrix& h = mv.h;

  KSearchResult ks;
  ClusterAssignment assignment;
  {
    StageTimer t(report.timings_seconds, "cluster");
    Rng search_rng(derive_seed(config.rng_seed, "induce/ksearch"));
    ks = estimate_k(h, config.k_search, config.clustering_method, config.n_neighbors,
                    config.n_init, search_rng);
    Rng final_rng(derive_seed(config.rng_seed, "induce/final"));
    assignment = config.clustering_method == ClusteringMethod::kKmeans
                     ? kmeans(h, ks.k_best, config.n_init, 300, final_rng)
                     : spectral(h, ks.k_best, config.n_neighbors, config.n_init, final_rng);
  }
  report.induced_k = ks.k_best;
  report.score_table = ks.score_table;
  IF_LOG_INFO("induced schema with K=" << ks.k_best);

  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.utterance_id);
  report.schema_path = "schema.jsonl";  // relative to out_dir, keeps the report portable
  save_assignment_jsonl(assignment, ids, (out / report.schema_path).string());
  save_score_table_csv(ks, (out / "score_table.csv").string());

  // Metrics over the labeled subset of the induction corpus.
  {
    std::vector<const UtteranceRecord*> labeled;
    std::vector<int> pred;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].gold_intent) {
        labeled.push_back(&records[i]);
        pred.push_back(assignment.labels[i]);
      }
    }
    if (!labeled.empty()) {
      report.train_metrics = compute_metrics(pred, encode_references(labeled),
                                             config.alignment_mode);
    }
  }

  LinearClassifier clf;
  {
    StageTimer t(report.timings_seconds, "classifier");
    clf = train_classifier(h, assignment.labels);
    save_classifier(clf, (out / "classifier.json").string());
  }

  if (!config.test_corpus.empty()) {
    StageTimer t(report.timings_seconds, "test");
    const DialogueSet test_dialogues = load_dialogues(config.test_corpus);
    const std::vector<UtteranceRecord> test_records = extract_intent_utterances(test_dialogues);
    if (test_records.empty()) throw ValidationError("induce: no InformIntent utterances in test corpus");
    const Matrix test_base = table.gather_records(test_records);
    const MultiViewEmbedding test_mv = forward_views(config, test_base, &mdb_head, &pgt_head);
    const std::vector<int> predictions = predict(clf, test_mv.h);

    std::vector<std::string> test_ids;
    test_ids.reserve(test_records.size());
    for (const auto& r : test_records) test_ids.push_back(r.utterance_id);
    save_predictions_jsonl(predictions, test_ids, (out / "predictions.jsonl").string());

    std::vector<const UtteranceRecord*> labeled;
    std::vector<int> pred;
    for (std::size_t i = 0; i < test_records.size(); ++i) {
      if (test_records[i].gold_intent) {
        labeled.push_back(&test_records[i]);
        pred.push_back(predictions[i]);
      }
    }
    if (!labeled.empty()) {
      report.test_metrics = compute_metrics(pred, encode_references(labeled),
                                            config.alignment_mode);
    }
  }

  {
    std::ofstream os(out / "report.json");
    if (!os) throw ConfigError("cannot write report under " + config.out_dir);
    os << report.to_json();
  }
  {
    std::ofstream os(out / "timings.json");
    if (!os) throw ConfigError("cannot write timings under " + config.out_dir);
    os << report.timings_json();
  }
  return report;
}

MetricsReport evaluate_files(const std::string& predictions_path,
                             const std::string& references_path, AlignmentMode mode) {
  std::ifstream is(predictions_path);
  if (!is) throw ConfigError("cannot open predictions: " + predictions_path);
  std::map<std::string, int> predicted;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(predictions_path + ":" + std::to_string(line_no) +
                            ": invalid JSON: " + e.what());
    }
    if (!j.contains("utterance_id") || !j.contains("predicted_cluster")) {
      throw ValidationError(predictions_path + ":" + std::to_string(line_no) +
                            ": expected utterance_id and predicted_cluster");
    }
    const std::string id = j.at("utterance_id").get<std::string>();
    if (!predicted.emplace(id, j.at("predicted_cluster").get<int>()).second) {
      throw ValidationError(predictions_path + ":" + std::to_string(line_no) +
                            ": duplicate utterance_id '" + id + "'");
    }
  }

  const DialogueSet dialogues = load_dialogues(references_path);
  std::vector<const UtteranceRecord*> labeled;
  for (const auto& d : dialogues.dialogues) {
    for (const auto& r : d.turns) {
      if (r.acts.count("InformIntent") > 0 && r.gold_intent) labeled.push_back(&r);
    }
  }
  if (labeled.empty()) throw ValidationError("evaluate: references contain no labeled utterances");

  std::vector<int> pred;
  std::string missing;
  for (const auto* r : labeled) {
    const auto it = predicted.find(r->utterance_id);
    if (it == predicted.end()) {
      missing += (missing.empty() ? "" : ", ") + r->utterance_id;
      continue;
    }
    pred.push_back(it->second);
  }
  if (!missing.empty()) {
    throw ValidationError("evaluate: no prediction for utterance ids: " + missing);
  }
  return compute_metrics(pred, encode_references(labeled), mode);
}

}  // namespace intentforge
