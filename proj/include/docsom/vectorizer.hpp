#pragma once

// Hybrid document weighting. A concept that occurs in a document gets its
// tf-idf plus the summed similarity to the document's other concepts; a concept
// that does not occur gets a rank-discounted sum of its similarity to the N
// closest concepts present in the document (coefficients N/N, (N-1)/N, ...).

#include <cstddef>
#include <string>
#include <vector>

#include "docsom/corpus.hpp"
#include "docsom/matrix.hpp"
#include "docsom/similarity.hpp"

namespace docsom {

enum class LogBase { kNatural, kTen };

struct WeightingConfig {
  std::size_t n_closest = 3;
  LogBase idf_log_base = LogBase::kNatural;
  // Treat negative similarities as zero in both branches.
  bool clamp_negative_sim = false;

  void validate() const;
};

struct DocumentVector {
  std::string doc_id;
  std::vector<double> weights;  // catalog order
};

// tf * log(|D| / df) in the configured base.
double tf_idf(int tf, std::size_t df, std::size_t doc_count, LogBase base);

// `doc` is a position in stats.doc_ids.
double weight_present(std::size_t concept_index, std::size_t doc, const CorpusStats& stats,
                      const SimilarityMatrix& sim, const WeightingConfig& cfg);
double weight_absent(std::size_t concept_index, std::size_t doc, const CorpusStats& stats,
                     const SimilarityMatrix& sim, const WeightingConfig& cfg);

std::vector<DocumentVector> build_document_matrix(const CorpusStats& stats,
                                                  const SimilarityMatrix& sim,
                                                  const WeightingConfig& cfg,
                                                  unsigned threads = 1);

DenseMatrix to_matrix(const std::vector<DocumentVector>& docs);

// doc_id column then one column per concept, 6 decimals.
std::string format_docmatrix_tsv(const std::vector<DocumentVector>& docs,
                                 const ConceptCatalog& catalog);

}  // namespace docsom
