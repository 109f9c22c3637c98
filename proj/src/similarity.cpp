#include "docsom/similarity.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "docsom/error.hpp"
#include "docsom/kernels.hpp"
#include "docsom/parallel.hpp"

namespace docsom {
namespace {

double clamp_unit(double s) { return std::clamp(s, -1.0, 1.0); }

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.concept_index < b.concept_index;
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(fmt::format("cosine_similarity: length mismatch ({} vs {})", a.size(), b.size()));
  }
  const double na = std::sqrt(kernels::dot(a, a));
  const double nb = std::sqrt(kernels::dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return clamp_unit(kernels::dot(a, b) / (na * nb));
}

SimilarityMatrix::SimilarityMatrix(DenseMatrix values, std::vector<bool> covered)
    : values_(std::move(values)), covered_(std::move(covered)) {
  if (values_.rows() != values_.cols() || covered_.size() != values_.rows()) {
    throw Error("similarity matrix must be square with one coverage flag per concept");
  }
}

SimilarityMatrix build_similarity_matrix(const std::vector<ConceptVector>& vectors,
                                         unsigned threads) {
  const std::size_t n = vectors.size();
  if (n == 0) throw Error("build_similarity_matrix: no concept vectors");
  const std::size_t dim = vectors.front().vector.size();
  std::vector<double> norms(n);
  std::vector<bool> covered(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (vectors[i].vector.size() != dim) throw Error("concept vectors differ in dimension");
    norms[i] = std::sqrt(kernels::dot(vectors[i].vector, vectors[i].vector));
    covered[i] = norms[i] > 0.0;
  }

  DenseMatrix s(n, n, 0.0);
  // Row i fills the upper triangle j >= i; rows are independent.
  parallel_for(n, threads, [&](std::size_t i) {
    if (!covered[i]) return;
    s(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!covered[j]) continue;
      s(i, j) = clamp_unit(kernels::dot(vectors[i].vector, vectors[j].vector) /
                           (norms[i] * norms[j]));
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s(j, i) = s(i, j);
  }
  return SimilarityMatrix(std::move(s), std::move(covered));
}

NeighborList top_n_closest(const SimilarityMatrix& matrix, std::size_t i, std::size_t n,
                           const std::optional<std::vector<std::size_t>>& restrict_to) {
  if (i >= matrix.order()) {
    throw Error(fmt::format("concept index {} out of range (order {})", i, matrix.order()));
  }
  if (n == 0) throw Error("top_n_closest: n must be >= 1");

  NeighborList out{i, {}};
  if (!matrix.covered(i)) return out;

  std::vector<Neighbor> pool;
  auto consider = [&](std::size_t j) {
    if (j >= matrix.order()) {
      throw Error(fmt::format("concept index {} out of range (order {})", j, matrix.order()));
    }
    if (j != i && matrix.covered(j)) pool.push_back({j, matrix(i, j)});
  };
  if (restrict_to) {
    std::vector<std::size_t> unique = *restrict_to;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (std::size_t j : unique) consider(j);
  } else {
    for (std::size_t j = 0; j < matrix.order(); ++j) consider(j);
  }

  const std::size_t k = std::min(n, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(),
                    ranks_before);
  pool.resize(k);
  out.neighbors = std::move(pool);
  return out;
}

std::string format_similarity_tsv(const SimilarityMatrix& matrix, const ConceptCatalog& catalog) {
  if (catalog.size() != matrix.order()) throw Error("catalog and similarity matrix disagree");
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "concept");
  for (const auto& p : catalog.phrases()) fmt::format_to(out, "\t{}", p);
  fmt::format_to(out, "\n");
  for (std::size_t i = 0; i < matrix.order(); ++i) {
    fmt::format_to(out, "{}", catalog.phrase(i));
    for (double v : matrix.row(i)) fmt::format_to(out, "\t{:.6f}", v);
    fmt::format_to(out, "\n");
  }
  return fmt::to_string(buf);
}

std::string format_neighbors_report(const SimilarityMatrix& matrix, const ConceptCatalog& catalog,
                                    std::size_t n) {
  if (catalog.size() != matrix.order()) throw Error("catalog and similarity matrix disagree");
  std::string out = "concept\trank\tneighbor\tscore\n";
  for (std::size_t i = 0; i < matrix.order(); ++i) {
    const auto list = top_n_closest(matrix, i, n);
    for (std::size_t r = 0; r < list.neighbors.size(); ++r) {
      const auto& nb = list.neighbors[r];
      out += fmt::format("{}\t{}\t{}\t{:.3f}\n", catalog.phrase(i), r + 1,
                         catalog.phrase(nb.concept_index), nb.score);
    }
  }
  return out;
}

}  // namespace docsom
