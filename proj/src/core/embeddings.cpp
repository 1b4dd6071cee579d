// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/embeddings.hpp"

#include <fstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace intentforge {

void EmbeddingTable::add(const std::string& utterance_id, std::vector<double> vector) {
  if (vectors_.empty()) {
    dim_ = vector.size();
  } else if (vector.size() != dim_) {
    throw ValidationError("embedding for '" + utterance_id + "' has dimension " +
                          std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
  }
  if (!vectors_.emplace(utterance_id, std::move(vector)).second) {
    throw ValidationError("duplicate embedding for utterance '" + utterance_id + "'");
  }
}

const std::vector<double>& EmbeddingTable::at(const std::string& utterance_id) const {
  const auto it = vectors_.find(utterance_id);
  if (it == vectors_.end()) {
    throw ValidationError("no embedding for utterance '" + utterance_id + "'");
  }
  return it->second;
}

Matrix EmbeddingTable::gather(const std::vector<std::string>& utterance_ids) const {
  Matrix out(utterance_ids.size(), dim_);
  for (std::size_t i = 0; i < utterance_ids.size(); ++i) {
    const auto& v = at(utterance_ids[i]);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

Matrix EmbeddingTable::gather_records(const std::vector<UtteranceRecord>& records) const {
  Matrix out(records.size(), dim_);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& v = at(records[i].utterance_id);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

EmbeddingTable load_embeddings_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open embedding file: " + path);
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("embedding line " + std::to_string(line_no) + ": malformed JSON: " +
                            e.what());
    }
    if (!obj.contains("utterance_id") || !obj.contains("vector")) {
      throw ValidationError("embedding line " + std::to_string(line_no) +
                            ": needs 'utterance_id' and 'vector'");
    }
    table.add(obj.at("utterance_id").get<std::string>(),
              obj.at("vector").get<std::vector<double>>());
  }
  return table;
}

void save_embeddings_jsonl(const EmbeddingTable& table, const std::vector<std::string>& order,
                           const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write embedding file: " + path);
  for (const auto& id : order) {
    nlohmann::ordered_json obj;
    obj["utterance_id"] = id;
    obj["vector"] = table.at(id);
    os << obj.dump() << "\n";
  }
}

}  // namespace intentforge
