#pragma once

// End-to-end orchestration and the stage commands behind the CLI. Stage
// commands recompute their upstream inputs from the configuration, so running
// them one after another yields the same artifacts as `pipeline`.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "docsom/config.hpp"
#include "docsom/corpus.hpp"
#include "docsom/embedding.hpp"
#include "docsom/similarity.hpp"
#include "docsom/som.hpp"
#include "docsom/vectorizer.hpp"

namespace docsom {

// Failure inside a named pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

namespace artifacts {
inline constexpr const char* kExclusions = "exclusions.txt";
inline constexpr const char* kAnnotations = "annotations.jsonl";
inline constexpr const char* kCatalog = "catalog.tsv";
inline constexpr const char* kSimilarity = "similarity.tsv";
inline constexpr const char* kNeighbors = "neighbors.tsv";
inline constexpr const char* kDocMatrix = "docmatrix.tsv";
inline constexpr const char* kMap = "map.json";
inline constexpr const char* kUMatrix = "umatrix.json";
inline constexpr const char* kHits = "hits.json";
inline constexpr const char* kTrace = "qe_trace.tsv";
inline constexpr const char* kUMatrixSvg = "umatrix.svg";
inline constexpr const char* kHitsSvg = "hits.svg";
inline constexpr const char* kManifest = "manifest.json";

// The ten artifacts every full pipeline run must produce.
const std::vector<std::string>& required();
}  // namespace artifacts

struct CorpusStage {
  std::vector<Document> docs;
  std::vector<ConceptAnnotation> annotations;
  CorpusBuild build;
};

struct SimilarityStage {
  EmbeddingTable table;
  std::vector<ConceptVector> vectors;
  CoverageSummary coverage;
  SimilarityMatrix matrix;
};

struct TrainStage {
  DenseMatrix data;
  TrainResult trained;
  UMatrix umatrix;
  HitHistogram hits;
};

CorpusStage run_corpus_stage(const PipelineConfig& cfg);
SimilarityStage run_similarity_stage(const PipelineConfig& cfg, const ConceptCatalog& catalog,
                                     std::ostream& log);
std::vector<DocumentVector> run_vectorize_stage(const PipelineConfig& cfg, const CorpusStats& stats,
                                                const SimilarityMatrix& matrix);
TrainStage run_train_stage(const PipelineConfig& cfg, const std::vector<DocumentVector>& docs);

// Each command writes its artifacts into cfg.paths.output_dir plus a manifest
// and returns the process exit status. Stage failures surface as StageError.
int cmd_pipeline(const PipelineConfig& cfg, std::ostream& log);
int cmd_extract(const PipelineConfig& cfg, std::ostream& log);
int cmd_similarity(const PipelineConfig& cfg, std::ostream& log);
int cmd_vectorize(const PipelineConfig& cfg, std::ostream& log);
int cmd_train(const PipelineConfig& cfg, std::ostream& log);
// Reads map.json, umatrix.json and hits.json from the output directory.
int cmd_render(const PipelineConfig& cfg, std::ostream& log);

// Prints "<phrase>\t<score>" lines, scores to 3 decimals.
int cmd_neighbors(const std::filesystem::path& embeddings, const std::filesystem::path& catalog,
                  const std::string& phrase, std::size_t n, std::ostream& out, std::ostream& log);
std::vector<Neighbor> query_neighbors(const EmbeddingTable& table, const ConceptCatalog& catalog,
                                      const std::string& phrase, std::size_t n);

struct CorpusSummary {
  std::size_t documents = 0;
  std::size_t included = 0;
  std::size_t excluded = 0;
  std::size_t concepts = 0;
  std::map<std::size_t, std::size_t> df_histogram;      // df -> concepts
  std::map<std::size_t, std::size_t> length_histogram;  // words -> concepts
};

CorpusSummary summarize_corpus(const CorpusStage& corpus);
std::string format_corpus_summary(const CorpusSummary& summary);
int cmd_stats(const PipelineConfig& cfg, std::ostream& out);

}  // namespace docsom
