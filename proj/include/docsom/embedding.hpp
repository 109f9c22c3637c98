#pragma once

// Pretrained word vectors (word2vec text format) and concept vectors built by
// summing the vectors of a concept phrase's words.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "docsom/corpus.hpp"

namespace docsom {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }

  // Returns false (and keeps the existing vector) when the token is already
  // present. Tokens are lowercased.
  bool add(std::string_view token, std::span<const double> vector);
  std::optional<std::span<const double>> find(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Messages about recoverable input issues (duplicate tokens).
  std::vector<std::string> warnings;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses word2vec text format: a "<count> <dim>" header, then one
// "<token> v1 ... v_dim" row per line. When `vocabulary` is given, rows for
// other tokens are validated but not stored.
EmbeddingTable parse_embeddings(std::string_view contents, std::string_view source = "embeddings",
                                const std::unordered_set<std::string>* vocabulary = nullptr);
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::unordered_set<std::string>* vocabulary = nullptr);

// Binary cache of a (usually vocabulary-filtered) table. `key` identifies the
// source, e.g. a hash of the embedding file plus the vocabulary.
void write_embedding_cache(const EmbeddingTable& table, const std::filesystem::path& path,
                           std::string_view key);
// nullopt when the file is missing, from another format version, or was
// written for a different key.
std::optional<EmbeddingTable> read_embedding_cache(const std::filesystem::path& path,
                                                   std::string_view key);

struct ConceptVector {
  std::size_t concept_index = 0;
  std::vector<double> vector;
  std::size_t covered_words = 0;
  std::size_t total_words = 0;

  bool uncovered() const { return covered_words == 0; }
};

// Sum of the word vectors in phrase order; out-of-vocabulary words are skipped.
ConceptVector concept_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                             std::size_t concept_index = 0);

struct CoverageSummary {
  std::size_t full = 0;
  std::size_t partial = 0;
  std::size_t uncovered = 0;
};

std::vector<ConceptVector> build_all_concept_vectors(const ConceptCatalog& catalog,
                                                     const EmbeddingTable& table,
                                                     unsigned threads = 1);
CoverageSummary summarize_coverage(const std::vector<ConceptVector>& vectors);

// Every token used by any catalog phrase.
std::unordered_set<std::string> catalog_vocabulary(const ConceptCatalog& catalog);

}  // namespace docsom
