#include "docsom/pipeline.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "docsom/error.hpp"
#include "docsom/hashing.hpp"
#include "docsom/kernels.hpp"
#include "docsom/render.hpp"
#include "docsom/text.hpp"

namespace docsom {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

template <typename Fn>
auto in_stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

// Collects written artifacts and their hashes for the run manifest.
class RunWriter {
 public:
  RunWriter(const PipelineConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)) {
    fs::create_directories(cfg_.paths.output_dir);
  }

  void write(const std::string& name, const std::string& contents) {
    write_file(cfg_.paths.output_dir / name, contents);
    artifacts_[name] = sha256_hex(contents);
  }

  void note(const std::string& key, json value) { extra_[key] = std::move(value); }

  void finish() {
    json inputs = json::object();
    auto add_input = [&](const char* key, const fs::path& p) {
      if (!p.empty() && fs::exists(p)) inputs[key] = {{"path", p.string()}, {"sha256", sha256_file(p)}};
    };
    add_input("config", cfg_.source);
    add_input("documents", cfg_.paths.documents);
    add_input("annotations", cfg_.paths.annotations);
    add_input("gazetteer", cfg_.paths.gazetteer);
    add_input("embeddings", cfg_.paths.embeddings);
    const std::string canonical = cfg_.canonical_json();
    json manifest = {{"tool", "docsom"},
                     {"version", kVersion},
                     {"command", command_},
                     {"seed", cfg_.som.seed},
                     {"threads", cfg_.threads},
                     {"kernels", kernels::active().name},
                     {"config_sha256", sha256_hex(canonical)},
                     {"config", json::parse(canonical)},
                     {"inputs", std::move(inputs)},
                     {"artifacts", artifacts_}};
    for (auto& [k, v] : extra_.items()) manifest[k] = v;
    const std::string name =
        command_ == "pipeline" ? artifacts::kManifest : fmt::format("manifest.{}.json", command_);
    write_file(cfg_.paths.output_dir / name, manifest.dump(2) + "\n");
  }

 private:
  const PipelineConfig& cfg_;
  std::string command_;
  json artifacts_ = json::object();
  json extra_ = json::object();
};

std::string embedding_cache_key(const PipelineConfig& cfg,
                                const std::unordered_set<std::string>& vocab) {
  std::vector<std::string> sorted(vocab.begin(), vocab.end());
  std::sort(sorted.begin(), sorted.end());
  return sha256_file(cfg.paths.embeddings) + ":" + sha256_hex(text::join(sorted, "\n"));
}

EmbeddingTable load_filtered_embeddings(const PipelineConfig& cfg,
                                        const std::unordered_set<std::string>& vocab,
                                        std::ostream& log) {
  if (!cfg.paths.embedding_cache.empty()) {
    const std::string key = embedding_cache_key(cfg, vocab);
    if (auto cached = read_embedding_cache(cfg.paths.embedding_cache, key)) return *cached;
    auto table = load_embeddings(cfg.paths.embeddings, &vocab);
    write_embedding_cache(table, cfg.paths.embedding_cache, key);
    for (const auto& w : table.warnings) log << "warning: " << w << '\n';
    return table;
  }
  auto table = load_embeddings(cfg.paths.embeddings, &vocab);
  for (const auto& w : table.warnings) log << "warning: " << w << '\n';
  return table;
}

std::string format_trace(const std::vector<QuantizationSample>& trace) {
  std::string out = "iteration\tquantization_error\n";
  for (const auto& s : trace) out += fmt::format("{}\t{:.9g}\n", s.iteration, s.error);
  return out;
}

json coverage_json(const CoverageSummary& c) {
  return {{"full", c.full}, {"partial", c.partial}, {"uncovered", c.uncovered}};
}

json corpus_json(const CorpusStage& corpus) {
  return {{"documents", corpus.docs.size()},
          {"included", corpus.build.stats.doc_count()},
          {"excluded", corpus.build.excluded.size()},
          {"concepts", corpus.build.catalog.size()}};
}

void write_corpus_artifacts(RunWriter& w, const CorpusStage& corpus) {
  w.write(artifacts::kExclusions, format_exclusions(corpus.build.excluded));
  w.write(artifacts::kAnnotations, format_annotations(corpus.annotations));
  w.write(artifacts::kCatalog, format_catalog(corpus.build.catalog, corpus.build.stats));
}

void write_similarity_artifacts(RunWriter& w, const PipelineConfig& cfg,
                                const CorpusStage& corpus, const SimilarityStage& sim) {
  w.write(artifacts::kSimilarity, format_similarity_tsv(sim.matrix, corpus.build.catalog));
  w.write(artifacts::kNeighbors,
          format_neighbors_report(sim.matrix, corpus.build.catalog, cfg.report_neighbors));
}

void write_train_artifacts(RunWriter& w, const PipelineConfig& cfg, const TrainStage& t) {
  w.write(artifacts::kMap, format_map_json(t.trained.map, cfg.som.seed, cfg.som.iterations));
  w.write(artifacts::kUMatrix, format_umatrix_json(t.umatrix));
  w.write(artifacts::kHits, format_hits_json(t.hits));
  w.write(artifacts::kTrace, format_trace(t.trained.trace));
}

void write_render_artifacts(RunWriter& w, const PipelineConfig& cfg, const SomMap& map,
                            const UMatrix& u, const HitHistogram& hits) {
  w.write(artifacts::kUMatrixSvg, render_umatrix(u, map, cfg.render));
  w.write(artifacts::kHitsSvg, render_hits(hits, map, cfg.render, &u));
}

void log_coverage(std::ostream& log, const SimilarityStage& sim) {
  log << fmt::format("concept coverage: {} full, {} partial, {} uncovered\n", sim.coverage.full,
                     sim.coverage.partial, sim.coverage.uncovered);
}

}  // namespace

const std::vector<std::string>& artifacts::required() {
  static const std::vector<std::string> names{kExclusions, kCatalog,   kSimilarity, kNeighbors,
                                              kDocMatrix,  kMap,       kUMatrix,    kHits,
                                              kUMatrixSvg, kHitsSvg};
  return names;
}

CorpusStage run_corpus_stage(const PipelineConfig& cfg) {
  return in_stage("extract", [&] {
    if (cfg.paths.annotations.empty() == cfg.paths.gazetteer.empty()) {
      throw Error("exactly one of annotations or gazetteer must be configured");
    }
    CorpusStage s;
    s.docs = load_documents(cfg.paths.documents);
    if (!cfg.paths.annotations.empty()) {
      s.annotations = load_annotations(cfg.paths.annotations, s.docs);
    } else {
      s.annotations = extract_all(s.docs, Gazetteer(load_gazetteer(cfg.paths.gazetteer)));
    }
    s.build = build_catalog_and_stats(s.docs, s.annotations);
    return s;
  });
}

SimilarityStage run_similarity_stage(const PipelineConfig& cfg, const ConceptCatalog& catalog,
                                     std::ostream& log) {
  return in_stage("similarity", [&] {
    SimilarityStage s;
    s.table = load_filtered_embeddings(cfg, catalog_vocabulary(catalog), log);
    s.vectors = build_all_concept_vectors(catalog, s.table, cfg.threads);
    s.coverage = summarize_coverage(s.vectors);
    s.matrix = build_similarity_matrix(s.vectors, cfg.threads);
    return s;
  });
}

std::vector<DocumentVector> run_vectorize_stage(const PipelineConfig& cfg, const CorpusStats& stats,
                                                const SimilarityMatrix& matrix) {
  return in_stage("vectorize",
                  [&] { return build_document_matrix(stats, matrix, cfg.weighting, cfg.threads); });
}

TrainStage run_train_stage(const PipelineConfig& cfg, const std::vector<DocumentVector>& docs) {
  return in_stage("train", [&] {
    TrainStage t;
    t.data = to_matrix(docs);
    if (cfg.som.normalize_inputs) normalize_rows(t.data);
    const auto bounds = data_bounds(t.data);
    SomMap initial = init_map(cfg.som, t.data.cols(), bounds);
    t.trained = train(std::move(initial), t.data, cfg.som, cfg.threads);
    t.umatrix = compute_umatrix(t.trained.map);
    std::vector<std::string> labels;
    labels.reserve(docs.size());
    for (const auto& d : docs) labels.push_back(d.doc_id);
    t.hits = compute_hits(t.trained.map, t.data, &labels, cfg.threads);
    return t;
  });
}

int cmd_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  in_stage("config", [&] { cfg.validate(); });
  RunWriter w(cfg, "pipeline");

  const auto corpus = run_corpus_stage(cfg);
  in_stage("extract", [&] { write_corpus_artifacts(w, corpus); });
  log << fmt::format("corpus: {} documents, {} included, {} excluded, {} concepts\n",
                     corpus.docs.size(), corpus.build.stats.doc_count(),
                     corpus.build.excluded.size(), corpus.build.catalog.size());

  const auto sim = run_similarity_stage(cfg, corpus.build.catalog, log);
  in_stage("similarity", [&] { write_similarity_artifacts(w, cfg, corpus, sim); });
  log_coverage(log, sim);

  const auto docs = run_vectorize_stage(cfg, corpus.build.stats, sim.matrix);
  in_stage("vectorize", [&] {
    w.write(artifacts::kDocMatrix, format_docmatrix_tsv(docs, corpus.build.catalog));
  });

  const auto trained = run_train_stage(cfg, docs);
  in_stage("train", [&] { write_train_artifacts(w, cfg, trained); });
  log << fmt::format("quantization error: {:.6f} -> {:.6f}\n", trained.trained.trace.front().error,
                     trained.trained.trace.back().error);

  in_stage("render", [&] {
    write_render_artifacts(w, cfg, trained.trained.map, trained.umatrix, trained.hits);
  });

  w.note("corpus", corpus_json(corpus));
  w.note("coverage", coverage_json(sim.coverage));
  w.note("quantization_error", {{"initial", trained.trained.trace.front().error},
                                {"final", trained.trained.trace.back().error}});
  w.finish();
  return 0;
}

int cmd_extract(const PipelineConfig& cfg, std::ostream& log) {
  in_stage("config", [&] { cfg.validate(); });
  RunWriter w(cfg, "extract");
  const auto corpus = run_corpus_stage(cfg);
  in_stage("extract", [&] { write_corpus_artifacts(w, corpus); });
  log << fmt::format("corpus: {} included, {} excluded, {} concepts\n",
                     corpus.build.stats.doc_count(), corpus.build.excluded.size(),
                     corpus.build.catalog.size());
  w.note("corpus", corpus_json(corpus));
  w.finish();
  return 0;
}

int cmd_similarity(const PipelineConfig& cfg, std::ostream& log) {
  in_stage("config", [&] { cfg.validate(); });
  RunWriter w(cfg, "similarity");
  const auto corpus = run_corpus_stage(cfg);
  const auto sim = run_similarity_stage(cfg, corpus.build.catalog, log);
  in_stage("similarity", [&] { write_similarity_artifacts(w, cfg, corpus, sim); });
  log_coverage(log, sim);
  w.note("coverage", coverage_json(sim.coverage));
  w.finish();
  return 0;
}

int cmd_vectorize(const PipelineConfig& cfg, std::ostream& log) {
  in_stage("config", [&] { cfg.validate(); });
  RunWriter w(cfg, "vectorize");
  const auto corpus = run_corpus_stage(cfg);
  const auto sim = run_similarity_stage(cfg, corpus.build.catalog, log);
  const auto docs = run_vectorize_stage(cfg, corpus.build.stats, sim.matrix);
  in_stage("vectorize", [&] {
    w.write(artifacts::kDocMatrix, format_docmatrix_tsv(docs, corpus.build.catalog));
  });
  w.finish();
  return 0;
}

int cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  in_stage("config", [&] { cfg.validate(); });
  RunWriter w(cfg, "train");
  const auto corpus = run_corpus_stage(cfg);
  const auto sim = run_similarity_stage(cfg, corpus.build.catalog, log);
  const auto docs = run_vectorize_stage(cfg, corpus.build.stats, sim.matrix);
  const auto trained = run_train_stage(cfg, docs);
  in_stage("train", [&] { write_train_artifacts(w, cfg, trained); });
  log << fmt::format("quantization error: {:.6f} -> {:.6f}\n", trained.trained.trace.front().error,
                     trained.trained.trace.back().error);
  w.note("quantization_error", {{"initial", trained.trained.trace.front().error},
                                {"final", trained.trained.trace.back().error}});
  w.finish();
  return 0;
}

int cmd_render(const PipelineConfig& cfg, std::ostream& log) {
  in_stage("config", [&] { cfg.validate(); });
  RunWriter w(cfg, "render");
  in_stage("render", [&] {
    const auto& dir = cfg.paths.output_dir;
    const auto map = parse_map_json(read_file(dir / artifacts::kMap));
    const auto u = parse_umatrix_json(read_file(dir / artifacts::kUMatrix));
    const auto hits = parse_hits_json(read_file(dir / artifacts::kHits));
    write_render_artifacts(w, cfg, map.map, u, hits);
  });
  log << "rendered " << artifacts::kUMatrixSvg << " and " << artifacts::kHitsSvg << '\n';
  w.finish();
  return 0;
}

std::vector<Neighbor> query_neighbors(const EmbeddingTable& table, const ConceptCatalog& catalog,
                                      const std::string& phrase, std::size_t n) {
  if (n < 1) throw Error("n must be >= 1");
  const auto idx = catalog.find(phrase);
  if (!idx) {
    const std::string wanted = text::normalize_phrase(phrase);
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& p : catalog.phrases()) ranked.emplace_back(text::edit_distance(wanted, p), p);
    std::sort(ranked.begin(), ranked.end());
    std::string hint;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i) {
      hint += (i ? ", " : "") + ("'" + ranked[i].second + "'");
    }
    throw Error(fmt::format("unknown concept '{}'; closest catalog phrases: {}", wanted, hint));
  }
  const auto vectors = build_all_concept_vectors(catalog, table);
  const auto matrix = build_similarity_matrix(vectors);
  return top_n_closest(matrix, *idx, n).neighbors;
}

int cmd_neighbors(const std::filesystem::path& embeddings, const std::filesystem::path& catalog_path,
                  const std::string& phrase, std::size_t n, std::ostream& out, std::ostream& log) {
  if (n < 1) throw StageError("neighbors", "n must be >= 1");
  return in_stage("neighbors", [&] {
    const auto catalog = load_catalog(catalog_path);
    const auto vocab = catalog_vocabulary(catalog);
    const auto table = load_embeddings(embeddings, &vocab);
    for (const auto& w : table.warnings) log << "warning: " << w << '\n';
    for (const auto& nb : query_neighbors(table, catalog, phrase, n)) {
      out << fmt::format("{}\t{:.3f}\n", catalog.phrase(nb.concept_index), nb.score);
    }
    return 0;
  });
}

CorpusSummary summarize_corpus(const CorpusStage& corpus) {
  CorpusSummary s;
  s.documents = corpus.docs.size();
  s.included = corpus.build.stats.doc_count();
  s.excluded = corpus.build.excluded.size();
  s.concepts = corpus.build.catalog.size();
  for (std::size_t i = 0; i < s.concepts; ++i) {
    ++s.df_histogram[corpus.build.stats.df[i]];
    ++s.length_histogram[corpus.build.catalog.tokens(i).size()];
  }
  return s;
}

std::string format_corpus_summary(const CorpusSummary& s) {
  std::string out = fmt::format("documents\t{}\nincluded\t{}\nexcluded\t{}\nconcepts\t{}\n",
                                s.documents, s.included, s.excluded, s.concepts);
  out += "# document frequency: df\tconcepts\n";
  for (const auto& [df, count] : s.df_histogram) out += fmt::format("df\t{}\t{}\n", df, count);
  out += "# concept length: words\tconcepts\n";
  for (const auto& [len, count] : s.length_histogram) {
    out += fmt::format("words\t{}\t{}\n", len, count);
  }
  return out;
}

int cmd_stats(const PipelineConfig& cfg, std::ostream& out) {
  const auto corpus = run_corpus_stage(cfg);
  out << format_corpus_summary(summarize_corpus(corpus));
  return 0;
}

}  // namespace docsom
