// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_CORPUS_HPP
#define INTENTFORGE_CORE_CORPUS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace intentforge {

enum class SpeakerRole { kAgent, kCustomer };

struct UtteranceRecord {
  std::string utterance_id;
  std::string text;
  SpeakerRole speaker_role = SpeakerRole::kCustomer;
  std::set<std::string> acts;
  std::optional<std::string> gold_intent;  // absent = noise/unlabeled
  std::string dataset_id;
};

struct Dialogue {
  std::string dialogue_id;
  std::vector<UtteranceRecord> turns;
};

struct DialogueSet {
  std::vector<Dialogue> dialogues;
  std::size_t n() const { return dialogues.size(); }
  std::size_t record_count() const;
};

// One registered training dataset: its labeled records and intent label list.
struct RegisteredDataset {
  std::vector<UtteranceRecord> records;
  std::vector<std::string> labels;  // L^k, index order fixed
};

// dataset_id -> dataset, with a stable registration order used for batch
// quota allocation.
class DatasetRegistry {
 public:
  void add(const std::string& dataset_id, RegisteredDataset dataset);
  std::size_t dataset_count() const { return order_.size(); }
  const std::vector<std::string>& dataset_ids() const { return order_; }
  const RegisteredDataset& dataset(const std::string& id) const;
  bool has(const std::string& id) const { return datasets_.count(id) > 0; }

  // Index of a record's gold intent within its dataset's label list.
  // Records without a gold intent are skipped by training-label lookups.
  static std::optional<std::size_t> intent_index(const RegisteredDataset& ds,
                                                 const UtteranceRecord& rec);

 private:
  std::vector<std::string> order_;
  std::map<std::string, RegisteredDataset> datasets_;
};

struct DomainBatch {
  // Stable dataset order; each entry pairs a record's utterance_id with the
  // intent index into that dataset's L^k.
  struct Group {
    std::string dataset_id;
    std::vector<std::pair<std::string, std::size_t>> samples;
  };
  std::vector<Group> groups;
  std::size_t total_size() const;
};

// Dialogue JSONL loader; one object per line, grouped by dialogue_id with
// file order preserved.
DialogueSet load_dialogues(const std::string& path);

// The InformIntent filter: every record whose acts contain "InformIntent",
// order-stable. Noise records (no gold intent) are retained.
std::vector<UtteranceRecord> extract_intent_utterances(const DialogueSet& dialogues);

// Near-equal per-dataset quotas summing to batch_size (first batch_size mod D
// datasets in registry order get one extra). Sampling is uniform without
// replacement within each dataset, with replacement only when the dataset is
// smaller than its quota. Only records with a gold intent are drawn.
DomainBatch build_domain_batch(const DatasetRegistry& registry, std::size_t batch_size, Rng& rng);

// Registry manifest: JSON mapping dataset_id -> {"path": str, "labels": [str]}.
// Each dataset's labeled records come from the InformIntent extraction of its
// dialogue file.
DatasetRegistry load_registry(const std::string& manifest_path);

void save_utterances_jsonl(const std::vector<UtteranceRecord>& records, const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_CORPUS_HPP
