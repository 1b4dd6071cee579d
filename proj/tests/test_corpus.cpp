// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "core/corpus.hpp"
#include "core/errors.hpp"
#include "helpers.hpp"

using intentforge::ConfigError;
using intentforge::DatasetRegistry;
using intentforge::DialogueSet;
using intentforge::DomainBatch;
using intentforge::RegisteredDataset;
using intentforge::Rng;
using intentforge::SpeakerRole;
using intentforge::UtteranceRecord;
using intentforge::ValidationError;

namespace {

std::string turn_line(const std::string& dialogue, int turn, const std::string& uid,
                      const std::string& text, bool inform, const char* intent) {
  std::string acts = inform ? R"(["InformIntent"])" : "[]";
  std::string intent_field = intent ? ("\"" + std::string(intent) + "\"") : "null";
  return "{\"dialogue_id\":\"" + dialogue + "\",\"turn_index\":" + std::to_string(turn) +
         ",\"utterance_id\":\"" + uid + "\",\"text\":\"" + text +
         "\",\"speaker_role\":\"customer\",\"acts\":" + acts + ",\"intent\":" + intent_field +
         ",\"dataset_id\":\"d\"}\n";
}

UtteranceRecord make_record(const std::string& uid, const char* intent) {
  UtteranceRecord rec;
  rec.utterance_id = uid;
  rec.text = "t";
  rec.speaker_role = SpeakerRole::kCustomer;
  rec.acts = {"InformIntent"};
  if (intent) rec.gold_intent = intent;
  rec.dataset_id = "d";
  return rec;
}

// A dataset of `n` labeled records cycling over `labels`.
RegisteredDataset make_dataset(const std::string& prefix, std::size_t n,
                               const std::vector<std::string>& labels) {
  RegisteredDataset ds;
  ds.labels = labels;
  for (std::size_t i = 0; i < n; ++i) {
    ds.records.push_back(make_record(prefix + std::to_string(i), labels[i % labels.size()].c_str()));
  }
  return ds;
}

}  // namespace

TEST_CASE("load_dialogues groups turns by dialogue id") {
  const auto dir = testutil::make_temp_dir("corpus");
  std::string content;
  for (int d = 0; d < 2; ++d) {
    for (int t = 0; t < 3; ++t) {
      content += turn_line("dlg" + std::to_string(d), t,
                           "u" + std::to_string(d) + "_" + std::to_string(t), "hello", t == 1,
                           nullptr);
    }
  }
  testutil::write_file(dir / "two.jsonl", content);
  const DialogueSet set = intentforge::load_dialogues((dir / "two.jsonl").string());
  CHECK(set.n() == 2);
  CHECK(set.record_count() == 6);
}

TEST_CASE("load_dialogues on an empty file") {
  const auto dir = testutil::make_temp_dir("corpus");
  testutil::write_file(dir / "empty.jsonl", "");
  CHECK(intentforge::load_dialogues((dir / "empty.jsonl").string()).n() == 0);
}

TEST_CASE("missing text field names the offending line") {
  const auto dir = testutil::make_temp_dir("corpus");
  testutil::write_file(
      dir / "bad.jsonl",
      turn_line("d0", 0, "u0", "ok", true, nullptr) +
          R"({"dialogue_id":"d0","turn_index":1,"utterance_id":"u1","speaker_role":"customer","acts":[]})" +
          "\n");
  try {
    intentforge::load_dialogues((dir / "bad.jsonl").string());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("text") != std::string::npos);
  }
}

TEST_CASE("malformed JSON names the offending line") {
  const auto dir = testutil::make_temp_dir("corpus");
  testutil::write_file(dir / "bad.jsonl",
                       turn_line("d0", 0, "u0", "ok", true, nullptr) + "{not json\n");
  try {
    intentforge::load_dialogues((dir / "bad.jsonl").string());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("duplicate utterance ids are rejected") {
  const auto dir = testutil::make_temp_dir("corpus");
  testutil::write_file(dir / "dup.jsonl", turn_line("d0", 0, "u0", "a", true, nullptr) +
                                              turn_line("d0", 1, "u0", "b", true, nullptr));
  CHECK_THROWS_AS(intentforge::load_dialogues((dir / "dup.jsonl").string()), ValidationError);
}

TEST_CASE("extract keeps exactly the InformIntent turns, in order") {
  const auto dir = testutil::make_temp_dir("corpus");
  std::string content;
  content += turn_line("d0", 0, "u0", "greet", false, nullptr);
  content += turn_line("d0", 1, "u1", "book a flight", true, "book");
  content += turn_line("d0", 2, "u2", "ok", false, nullptr);
  content += turn_line("d0", 3, "u3", "chitchat", true, nullptr);  // noise, still extracted
  content += turn_line("d0", 4, "u4", "bye", false, nullptr);
  testutil::write_file(dir / "five.jsonl", content);
  const DialogueSet set = intentforge::load_dialogues((dir / "five.jsonl").string());
  const auto extracted = intentforge::extract_intent_utterances(set);
  REQUIRE(extracted.size() == 2);
  CHECK(extracted[0].utterance_id == "u1");
  CHECK(extracted[1].utterance_id == "u3");
  CHECK(!extracted[1].gold_intent.has_value());
}

TEST_CASE("extract of a corpus without InformIntent is empty") {
  const auto dir = testutil::make_temp_dir("corpus");
  testutil::write_file(dir / "none.jsonl", turn_line("d0", 0, "u0", "hi", false, nullptr));
  const DialogueSet set = intentforge::load_dialogues((dir / "none.jsonl").string());
  CHECK(intentforge::extract_intent_utterances(set).empty());
}

TEST_CASE("domain batch quotas: D=6, batch 36 gives six groups of six") {
  DatasetRegistry registry;
  for (int k = 0; k < 6; ++k) {
    registry.add("ds" + std::to_string(k), make_dataset("ds" + std::to_string(k) + "-", 40,
                                                        {"a", "b", "c", "d"}));
  }
  Rng rng(1);
  const DomainBatch batch = intentforge::build_domain_batch(registry, 36, rng);
  REQUIRE(batch.groups.size() == 6);
  for (const auto& g : batch.groups) CHECK(g.samples.size() == 6);
  CHECK(batch.total_size() == 36);
}

TEST_CASE("domain batch quotas: D=6, batch 64 gives [11,11,11,11,10,10]") {
  DatasetRegistry registry;
  for (int k = 0; k < 6; ++k) {
    registry.add("ds" + std::to_string(k), make_dataset("ds" + std::to_string(k) + "-", 40,
                                                        {"a", "b", "c", "d"}));
  }
  Rng rng(1);
  const DomainBatch batch = intentforge::build_domain_batch(registry, 64, rng);
  std::vector<std::size_t> sizes;
  for (const auto& g : batch.groups) sizes.push_back(g.samples.size());
  CHECK(sizes == std::vector<std::size_t>{11, 11, 11, 11, 10, 10});
}

TEST_CASE("single-dataset batch") {
  DatasetRegistry registry;
  registry.add("only", make_dataset("only-", 20, {"a", "b"}));
  Rng rng(5);
  const DomainBatch batch = intentforge::build_domain_batch(registry, 8, rng);
  REQUIRE(batch.groups.size() == 1);
  CHECK(batch.groups[0].samples.size() == 8);
  // Large enough dataset: sampling is without replacement.
  std::set<std::string> distinct;
  for (const auto& [uid, idx] : batch.groups[0].samples) {
    distinct.insert(uid);
    CHECK(idx < 2);
  }
  CHECK(distinct.size() == 8);
}

TEST_CASE("batch size below dataset count is a configuration error") {
  DatasetRegistry registry;
  for (int k = 0; k < 6; ++k) {
    registry.add("ds" + std::to_string(k), make_dataset("x" + std::to_string(k) + "-", 10,
                                                        {"a", "b"}));
  }
  Rng rng(2);
  CHECK_THROWS_AS(intentforge::build_domain_batch(registry, 5, rng), ConfigError);
}

TEST_CASE("quota property: sizes sum to batch_size with spread at most one") {
  Rng seed_rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + seed_rng.next_below(7);
    DatasetRegistry registry;
    for (std::size_t k = 0; k < d; ++k) {
      registry.add("ds" + std::to_string(k),
                   make_dataset("t" + std::to_string(trial) + "-" + std::to_string(k) + "-", 15,
                                {"a", "b", "c"}));
    }
    const std::size_t batch_size = d + seed_rng.next_below(40);
    Rng rng(seed_rng.next_u64());
    const DomainBatch batch = intentforge::build_domain_batch(registry, batch_size, rng);
    std::size_t total = 0, smallest = batch_size + 1, largest = 0;
    for (const auto& g : batch.groups) {
      total += g.samples.size();
      smallest = std::min(smallest, g.samples.size());
      largest = std::max(largest, g.samples.size());
    }
    CHECK(total == batch_size);
    CHECK(largest - smallest <= 1);
  }
}

TEST_CASE("identical seeds give identical batches") {
  DatasetRegistry registry;
  registry.add("a", make_dataset("a-", 30, {"x", "y", "z"}));
  registry.add("b", make_dataset("b-", 30, {"x", "y"}));
  Rng r1(99), r2(99);
  const DomainBatch b1 = intentforge::build_domain_batch(registry, 17, r1);
  const DomainBatch b2 = intentforge::build_domain_batch(registry, 17, r2);
  REQUIRE(b1.groups.size() == b2.groups.size());
  for (std::size_t g = 0; g < b1.groups.size(); ++g) {
    CHECK(b1.groups[g].samples == b2.groups[g].samples);
  }
}

TEST_CASE("registry validation") {
  DatasetRegistry registry;
  CHECK_THROWS_AS(registry.add("one_label", make_dataset("o-", 5, {"only"})), ValidationError);
  RegisteredDataset bad = make_dataset("b-", 5, {"a", "b"});
  bad.records.push_back(make_record("stray", "not_in_list"));
  CHECK_THROWS_AS(registry.add("bad", std::move(bad)), ValidationError);
}

TEST_CASE("registry manifest loading") {
  const auto dir = testutil::make_temp_dir("corpus");
  std::string content;
  content += turn_line("d0", 0, "u0", "pay my bill", true, "pay_bill");
  content += turn_line("d0", 1, "u1", "check balance", true, "check_balance");
  testutil::write_file(dir / "bank.jsonl", content);
  testutil::write_file(dir / "registry.json",
                       std::string("{\"bank\": {\"path\": \"") + (dir / "bank.jsonl").string() +
                           "\", \"labels\": [\"pay_bill\", \"check_balance\"]}}");
  const DatasetRegistry registry = intentforge::load_registry((dir / "registry.json").string());
  CHECK(registry.dataset_count() == 1);
  CHECK(registry.dataset("bank").records.size() == 2);
  CHECK(registry.dataset("bank").labels.size() == 2);
}

TEST_CASE("utterance JSONL writer emits one object per record") {
  const auto dir = testutil::make_temp_dir("corpus");
  std::vector<UtteranceRecord> records = {make_record("u0", "a"), make_record("u1", nullptr)};
  const auto path = (dir / "out.jsonl").string();
  intentforge::save_utterances_jsonl(records, path);
  const std::string content = testutil::read_file(path);
  CHECK(std::count(content.begin(), content.end(), '\n') == 2);
  CHECK(content.find("\"u0\"") != std::string::npos);
  CHECK(content.find("null") != std::string::npos);
}
