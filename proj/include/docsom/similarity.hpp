#pragma once

// Cosine similarity between concept vectors, the dense symmetric similarity
// matrix and nearest-concept queries over it.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "docsom/corpus.hpp"
#include "docsom/embedding.hpp"
#include "docsom/matrix.hpp"

namespace docsom {

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Zero if either norm is zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // `covered[i]` is false for concepts whose vector is all zero; their rows
  // and columns must be zero.
  SimilarityMatrix(DenseMatrix values, std::vector<bool> covered);

  std::size_t order() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  bool covered(std::size_t i) const { return covered_.at(i); }
  const DenseMatrix& values() const { return values_; }

 private:
  DenseMatrix values_;
  std::vector<bool> covered_;
};

// Each (i <= j) pair is computed once and mirrored. Diagonal is exactly 1 for
// covered concepts.
SimilarityMatrix build_similarity_matrix(const std::vector<ConceptVector>& vectors,
                                         unsigned threads = 1);

struct Neighbor {
  std::size_t concept_index;
  double score;
  bool operator==(const Neighbor&) const = default;
};

struct NeighborList {
  std::size_t concept_index;
  std::vector<Neighbor> neighbors;  // score descending, then index ascending
};

// Up to n closest concepts to i, drawn from `restrict_to` when given. The
// concept itself and uncovered concepts are never returned.
NeighborList top_n_closest(const SimilarityMatrix& matrix, std::size_t i, std::size_t n,
                           const std::optional<std::vector<std::size_t>>& restrict_to = {});

// Tab-separated, concept phrases on the header row and column, 6 decimals.
std::string format_similarity_tsv(const SimilarityMatrix& matrix, const ConceptCatalog& catalog);
// concept, rank, neighbor, score (3 decimals); one row per neighbor.
std::string format_neighbors_report(const SimilarityMatrix& matrix, const ConceptCatalog& catalog,
                                    std::size_t n);

}  // namespace docsom
