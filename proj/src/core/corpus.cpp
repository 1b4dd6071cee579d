// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/log.hpp"

namespace intentforge {

namespace {

SpeakerRole parse_role(const std::string& role, std::size_t line_no) {
  if (role == "agent") return SpeakerRole::kAgent;
  if (role == "customer") return SpeakerRole::kCustomer;
  throw ValidationError("line " + std::to_string(line_no) + ": unknown speaker_role '" + role + "'");
}

UtteranceRecord parse_record(const nlohmann::json& obj, std::size_t line_no) {
  for (const char* field : {"dialogue_id", "utterance_id", "text", "speaker_role", "acts"}) {
    if (!obj.contains(field)) {
      throw ValidationError("line " + std::to_string(line_no) + ": missing field '" + field + "'");
    }
  }
  UtteranceRecord rec;
  rec.utterance_id = obj.at("utterance_id").get<std::string>();
  rec.text = obj.at("text").get<std::string>();
  if (rec.text.empty()) {
    throw ValidationError("line " + std::to_string(line_no) + ": empty text");
  }
  rec.speaker_role = parse_role(obj.at("speaker_role").get<std::string>(), line_no);
  for (const auto& act : obj.at("acts")) rec.acts.insert(act.get<std::string>());
  if (obj.contains("intent") && !obj.at("intent").is_null()) {
    rec.gold_intent = obj.at("intent").get<std::string>();
  }
  if (obj.contains("dataset_id")) rec.dataset_id = obj.at("dataset_id").get<std::string>();
  return rec;
}

}  // namespace

std::size_t DialogueSet::record_count() const {
  std::size_t n = 0;
  for (const auto& d : dialogues) n += d.turns.size();
  return n;
}

DialogueSet load_dialogues(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open dialogue file: " + path);

  DialogueSet set;
  std::unordered_map<std::string, std::size_t> dialogue_index;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    UtteranceRecord rec;
    try {
      rec = parse_record(obj, line_no);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": bad field type: " + e.what());
    }
    if (!seen_ids.insert(rec.utterance_id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate utterance_id '" +
                            rec.utterance_id + "'");
    }
    const std::string dialogue_id = obj.at("dialogue_id").get<std::string>();
    auto [it, inserted] = dialogue_index.try_emplace(dialogue_id, set.dialogues.size());
    if (inserted) set.dialogues.push_back(Dialogue{dialogue_id, {}});
    set.dialogues[it->second].turns.push_back(std::move(rec));
  }
  IF_LOG_DEBUG("loaded " << set.n() << " dialogues (" << set.record_count() << " turns) from "
                         << path);
  return set;
}

std::vector<UtteranceRecord> extract_intent_utterances(const DialogueSet& dialogues) {
  std::vector<UtteranceRecord> out;
  for (const auto& d : dialogues.dialogues) {
    for (const auto& turn : d.turns) {
      if (turn.acts.count("InformIntent") > 0) out.push_back(turn);
    }
  }
  return out;
}

void DatasetRegistry::add(const std::string& dataset_id, RegisteredDataset dataset) {
  if (datasets_.count(dataset_id) > 0) {
    throw ValidationError("dataset registered twice: " + dataset_id);
  }
  if (dataset.labels.size() < 2) {
    throw ValidationError("dataset '" + dataset_id + "' needs at least two intent labels");
  }
  std::set<std::string> distinct(dataset.labels.begin(), dataset.labels.end());
  if (distinct.size() != dataset.labels.size()) {
    throw ValidationError("dataset '" + dataset_id + "' has duplicate intent labels");
  }
  for (const auto& rec : dataset.records) {
    if (rec.gold_intent &&
        std::find(dataset.labels.begin(), dataset.labels.end(), *rec.gold_intent) ==
            dataset.labels.end()) {
      throw ValidationError("dataset '" + dataset_id + "': record '" + rec.utterance_id +
                            "' has intent '" + *rec.gold_intent + "' outside the label list");
    }
  }
  order_.push_back(dataset_id);
  datasets_.emplace(dataset_id, std::move(dataset));
}

const RegisteredDataset& DatasetRegistry::dataset(const std::string& id) const {
  const auto it = datasets_.find(id);
  if (it == datasets_.end()) throw ValidationError("unknown dataset: " + id);
  return it->second;
}

std::optional<std::size_t> DatasetRegistry::intent_index(const RegisteredDataset& ds,
                                                         const UtteranceRecord& rec) {
  if (!rec.gold_intent) return std::nullopt;
  const auto it = std::find(ds.labels.begin(), ds.labels.end(), *rec.gold_intent);
  if (it == ds.labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ds.labels.begin());
}

std::size_t DomainBatch::total_size() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.samples.size();
  return n;
}

DomainBatch build_domain_batch(const DatasetRegistry& registry, std::size_t batch_size, Rng& rng) {
  const std::size_t d = registry.dataset_count();
  if (d == 0) throw ConfigError("build_domain_batch: empty registry");
  if (batch_size < d) {
    throw ConfigError("build_domain_batch: batch_size " + std::to_string(batch_size) +
                      " below dataset count " + std::to_string(d));
  }
  const std::size_t base = batch_size / d;
  const std::size_t extra = batch_size % d;

  DomainBatch batch;
  for (std::size_t k = 0; k < d; ++k) {
    const std::string& id = registry.dataset_ids()[k];
    const RegisteredDataset& ds = registry.dataset(id);
    const std::size_t quota = base + (k < extra ? 1 : 0);

    // Labeled records only; noise never enters a training batch.
    std::vector<std::pair<std::string, std::size_t>> labeled;
    for (const auto& rec : ds.records) {
      if (const auto idx = DatasetRegistry::intent_index(ds, rec)) {
        labeled.emplace_back(rec.utterance_id, *idx);
      }
    }
    if (labeled.empty()) {
      throw ValidationError("dataset '" + id + "' has no labeled records to sample");
    }

    DomainBatch::Group group{id, {}};
    group.samples.reserve(quota);
    if (labeled.size() >= quota) {
      // Partial Fisher-Yates draws the first `quota` positions without
      // replacement.
      for (std::size_t i = 0; i < quota; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(labeled.size() - i));
        std::swap(labeled[i], labeled[j]);
        group.samples.push_back(labeled[i]);
      }
    } else {
      for (std::size_t i = 0; i < quota; ++i) {
        group.samples.push_back(labeled[rng.next_below(labeled.size())]);
      }
    }
    batch.groups.push_back(std::move(group));
  }
  return batch;
}

DatasetRegistry load_registry(const std::string& manifest_path) {
  std::ifstream is(manifest_path);
  if (!is) throw ConfigError("cannot open registry manifest: " + manifest_path);
  nlohmann::ordered_json manifest;
  try {
    is >> manifest;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("registry manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!manifest.is_object()) throw ValidationError("registry manifest must be a JSON object");

  DatasetRegistry registry;
  for (const auto& [dataset_id, entry] : manifest.items()) {
    if (!entry.contains("path") || !entry.contains("labels")) {
      throw ValidationError("registry entry '" + dataset_id + "' needs 'path' and 'labels'");
    }
    RegisteredDataset ds;
    for (const auto& label : entry.at("labels")) ds.labels.push_back(label.get<std::string>());
    const DialogueSet dialogues = load_dialogues(entry.at("path").get<std::string>());
    ds.records = extract_intent_utterances(dialogues);
    registry.add(dataset_id, std::move(ds));
  }
  return registry;
}

void save_utterances_jsonl(const std::vector<UtteranceRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open file for writing: " + path);
  for (const auto& rec : records) {
    nlohmann::ordered_json obj;
    obj["utterance_id"] = rec.utterance_id;
    obj["text"] = rec.text;
    obj["speaker_role"] = rec.speaker_role == SpeakerRole::kAgent ? "agent" : "customer";
    obj["acts"] = rec.acts;
    obj["intent"] = rec.gold_intent ? nlohmann::ordered_json(*rec.gold_intent)
                                    : nlohmann::ordered_json(nullptr);
    obj["dataset_id"] = rec.dataset_id;
    os << obj.dump() << "\n";
  }
}

}  // namespace intentforge
