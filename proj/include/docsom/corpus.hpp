#pragma once

// Documents, disease-concept annotations and the corpus statistics that feed
// the weighting scheme.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace docsom {

struct Document {
  std::string id;
  std::string title;
  std::string abstract;

  // Title and abstract are the only analyzable content.
  std::string text() const { return title + "\n" + abstract; }
};

struct ConceptAnnotation {
  std::string doc_id;
  std::string surface;    // text as it appeared (or as exported upstream)
  std::string preferred;  // normalized canonical phrase
  int count = 1;
};

// Lexicographically ordered set of canonical concept phrases.
class ConceptCatalog {
 public:
  ConceptCatalog() = default;
  // Normalizes, deduplicates and sorts. Empty phrases are rejected.
  explicit ConceptCatalog(std::vector<std::string> phrases);

  std::size_t size() const { return phrases_.size(); }
  bool empty() const { return phrases_.empty(); }
  const std::string& phrase(std::size_t i) const { return phrases_.at(i); }
  const std::vector<std::string>& tokens(std::size_t i) const { return tokens_.at(i); }
  const std::vector<std::string>& phrases() const { return phrases_; }
  std::optional<std::size_t> find(std::string_view phrase) const;

 private:
  std::vector<std::string> phrases_;
  std::vector<std::vector<std::string>> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ConceptCount {
  std::size_t concept_index;
  int tf;
  bool operator==(const ConceptCount&) const = default;
};

// Frequencies over the included documents (those with at least one concept).
struct CorpusStats {
  std::vector<std::string> doc_ids;            // included documents, input order
  std::vector<std::vector<ConceptCount>> tf;   // per document, sorted by concept index
  std::vector<std::size_t> df;                 // per concept

  std::size_t doc_count() const { return doc_ids.size(); }
  std::size_t concept_count() const { return df.size(); }
  int term_frequency(std::size_t doc, std::size_t concept_index) const;
};

struct CorpusBuild {
  ConceptCatalog catalog;
  CorpusStats stats;
  std::vector<std::string> excluded;  // documents without any concept
};

// Greedy longest-match phrase matcher over normalized tokens.
class Gazetteer {
 public:
  explicit Gazetteer(const std::vector<std::string>& phrases);

  std::size_t size() const { return phrases_.size(); }
  std::size_t max_tokens() const { return max_tokens_; }
  bool contains(const std::string& normalized) const { return phrases_.contains(normalized); }

 private:
  std::unordered_set<std::string> phrases_;
  std::size_t max_tokens_ = 0;
};

std::vector<Document> load_documents(const std::filesystem::path& path);
std::vector<Document> parse_documents(std::string_view jsonl, std::string_view source = "documents");

// Duplicate (doc, phrase) records are merged by summing counts; output keeps
// the order of first appearance.
std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& path,
                                                const std::vector<Document>& docs);
std::vector<ConceptAnnotation> parse_annotations(std::string_view jsonl,
                                                 const std::vector<Document>& docs,
                                                 std::string_view source = "annotations");
std::string format_annotations(const std::vector<ConceptAnnotation>& annotations);

// One phrase per line; blank lines and '#' comments are skipped.
std::vector<std::string> load_gazetteer(const std::filesystem::path& path);
std::vector<std::string> parse_gazetteer(std::string_view contents,
                                         std::string_view source = "gazetteer");

// Per-concept annotations for one document, sorted by phrase.
std::vector<ConceptAnnotation> extract_concepts(const Document& doc, const Gazetteer& gazetteer);
std::vector<ConceptAnnotation> extract_all(const std::vector<Document>& docs,
                                           const Gazetteer& gazetteer);

CorpusBuild build_catalog_and_stats(const std::vector<Document>& docs,
                                    const std::vector<ConceptAnnotation>& annotations);

std::string format_exclusions(const std::vector<std::string>& excluded);
// index, phrase, df, word count; header row first.
std::string format_catalog(const ConceptCatalog& catalog, const CorpusStats& stats);
// Accepts either a catalog TSV written by format_catalog or a plain phrase list.
ConceptCatalog load_catalog(const std::filesystem::path& path);

}  // namespace docsom
