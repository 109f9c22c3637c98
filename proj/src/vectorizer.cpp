#include "docsom/vectorizer.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "docsom/error.hpp"
#include "docsom/parallel.hpp"

namespace docsom {
namespace {

double similarity(const SimilarityMatrix& sim, std::size_t i, std::size_t j,
                  const WeightingConfig& cfg) {
  const double s = sim(i, j);
  return cfg.clamp_negative_sim ? std::max(0.0, s) : s;
}

void check_inputs(const CorpusStats& stats, const SimilarityMatrix& sim, std::size_t concept_index,
                  std::size_t doc) {
  if (stats.concept_count() != sim.order()) {
    throw Error(fmt::format("corpus has {} concepts but similarity matrix has order {}",
                            stats.concept_count(), sim.order()));
  }
  if (concept_index >= sim.order()) {
    throw Error(fmt::format("concept index {} out of range", concept_index));
  }
  if (doc >= stats.doc_count()) throw Error(fmt::format("document position {} out of range", doc));
}

}  // namespace

void WeightingConfig::validate() const {
  if (n_closest < 1) throw Error("n_closest must be >= 1");
}

double tf_idf(int tf, std::size_t df, std::size_t doc_count, LogBase base) {
  if (df == 0) throw Error("tf_idf: document frequency is zero");
  if (df > doc_count) {
    throw Error(fmt::format("tf_idf: df {} exceeds document count {}", df, doc_count));
  }
  if (df == doc_count) return 0.0;
  const double ratio = static_cast<double>(doc_count) / static_cast<double>(df);
  const double idf = base == LogBase::kNatural ? std::log(ratio) : std::log10(ratio);
  return tf * idf;
}

double weight_present(std::size_t concept_index, std::size_t doc, const CorpusStats& stats,
                      const SimilarityMatrix& sim, const WeightingConfig& cfg) {
  check_inputs(stats, sim, concept_index, doc);
  const int tf = stats.term_frequency(doc, concept_index);
  if (tf <= 0) throw Error("weight_present: concept does not occur in the document");
  double weight = tf_idf(tf, stats.df[concept_index], stats.doc_count(), cfg.idf_log_base);
  for (const auto& term : stats.tf[doc]) {
    if (term.concept_index != concept_index) {
      weight += similarity(sim, concept_index, term.concept_index, cfg);
    }
  }
  return weight;
}

double weight_absent(std::size_t concept_index, std::size_t doc, const CorpusStats& stats,
                     const SimilarityMatrix& sim, const WeightingConfig& cfg) {
  check_inputs(stats, sim, concept_index, doc);
  if (stats.term_frequency(doc, concept_index) > 0) {
    throw Error("weight_absent: concept occurs in the document");
  }
  struct Ranked {
    double score;
    std::size_t index;
  };
  std::vector<Ranked> present;
  present.reserve(stats.tf[doc].size());
  for (const auto& term : stats.tf[doc]) {
    present.push_back({similarity(sim, concept_index, term.concept_index, cfg), term.concept_index});
  }
  const std::size_t k = std::min(cfg.n_closest, present.size());
  std::partial_sort(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(k),
                    present.end(), [](const Ranked& a, const Ranked& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.index < b.index;
                    });
  const double n = static_cast<double>(cfg.n_closest);
  double weight = 0.0;
  for (std::size_t rank = 0; rank < k; ++rank) {
    weight += (n - static_cast<double>(rank)) / n * present[rank].score;
  }
  return weight;
}

std::vector<DocumentVector> build_document_matrix(const CorpusStats& stats,
                                                  const SimilarityMatrix& sim,
                                                  const WeightingConfig& cfg, unsigned threads) {
  cfg.validate();
  if (stats.concept_count() != sim.order()) {
    throw Error(fmt::format("corpus has {} concepts but similarity matrix has order {}",
                            stats.concept_count(), sim.order()));
  }
  const std::size_t concepts = sim.order();
  std::vector<DocumentVector> out(stats.doc_count());
  parallel_for(stats.doc_count(), threads, [&](std::size_t d) {
    auto& dv = out[d];
    dv.doc_id = stats.doc_ids[d];
    dv.weights.resize(concepts);
    for (std::size_t i = 0; i < concepts; ++i) {
      dv.weights[i] = stats.term_frequency(d, i) > 0 ? weight_present(i, d, stats, sim, cfg)
                                                     : weight_absent(i, d, stats, sim, cfg);
    }
  });
  return out;
}

DenseMatrix to_matrix(const std::vector<DocumentVector>& docs) {
  if (docs.empty()) return {};
  DenseMatrix m(docs.size(), docs.front().weights.size());
  for (std::size_t r = 0; r < docs.size(); ++r) {
    if (docs[r].weights.size() != m.cols()) throw Error("document vectors differ in length");
    std::copy(docs[r].weights.begin(), docs[r].weights.end(), m.row(r).begin());
  }
  return m;
}

std::string format_docmatrix_tsv(const std::vector<DocumentVector>& docs,
                                 const ConceptCatalog& catalog) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "doc_id");
  for (const auto& p : catalog.phrases()) fmt::format_to(out, "\t{}", p);
  fmt::format_to(out, "\n");
  for (const auto& dv : docs) {
    if (dv.weights.size() != catalog.size()) throw Error("document vector length != catalog size");
    fmt::format_to(out, "{}", dv.doc_id);
    for (double w : dv.weights) fmt::format_to(out, "\t{:.6f}", w);
    fmt::format_to(out, "\n");
  }
  return fmt::to_string(buf);
}

}  // namespace docsom
