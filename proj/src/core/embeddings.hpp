// Copyright 2026 The Intentforge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTENTFORGE_CORE_EMBEDDINGS_HPP
#define INTENTFORGE_CORE_EMBEDDINGS_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "core/corpus.hpp"
#include "core/matrix.hpp"

namespace intentforge {

// Base embeddings keyed by utterance_id. The backbone encoder is out of
// process; its vectors arrive as files.
class EmbeddingTable {
 public:
  void add(const std::string& utterance_id, std::vector<double> vector);
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool has(const std::string& utterance_id) const { return vectors_.count(utterance_id) > 0; }
  const std::vector<double>& at(const std::string& utterance_id) const;

  // Row-per-id matrix in the given order; missing ids are a validation error.
  Matrix gather(const std::vector<std::string>& utterance_ids) const;
  Matrix gather_records(const std::vector<UtteranceRecord>& records) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// JSONL {"utterance_id": str, "vector": [float]}.
EmbeddingTable load_embeddings_jsonl(const std::string& path);
void save_embeddings_jsonl(const EmbeddingTable& table, const std::vector<std::string>& order,
                           const std::string& path);

}  // namespace intentforge

#endif  // INTENTFORGE_CORE_EMBEDDINGS_HPP
