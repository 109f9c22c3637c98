// docsom: cluster documents by disease concepts with a self-organizing map.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "docsom/config.hpp"
#include "docsom/kernels.hpp"
#include "docsom/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config, "Pipeline configuration (INI)")->required();
  cmd->add_option("--seed", flags.seed, "Override [som] seed");
  cmd->add_option("--threads", flags.threads, "Worker threads for parallel stages")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", flags.out_dir, "Override [paths] output_dir");
}

docsom::PipelineConfig resolve_config(const CommonFlags& flags) {
  auto cfg = docsom::load_config(flags.config);
  if (flags.seed) cfg.som.seed = *flags.seed;
  if (flags.threads) cfg.threads = *flags.threads;
  if (!flags.out_dir.empty()) cfg.paths.output_dir = flags.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-based biomedical document clustering with self-organizing maps"};
  app.require_subcommand(1);
  std::string kernels;
  app.add_option("--kernels", kernels, "Kernel backend: scalar, avx2 or neon (default: widest)");

  CommonFlags flags;
  using Command = int (*)(const docsom::PipelineConfig&, std::ostream&);
  const std::pair<const char*, Command> stage_commands[] = {
      {"pipeline", docsom::cmd_pipeline}, {"extract", docsom::cmd_extract},
      {"similarity", docsom::cmd_similarity}, {"vectorize", docsom::cmd_vectorize},
      {"train", docsom::cmd_train}, {"render", docsom::cmd_render}};
  const char* descriptions[] = {
      "Run every stage and write all artifacts plus a run manifest",
      "Load documents, extract or load concepts, write catalog and exclusions",
      "Build concept vectors and the similarity matrix, write neighbor report",
      "Compute the hybrid-weighted document matrix",
      "Train the SOM and write map, U-matrix and hit histogram",
      "Render umatrix.svg and hits.svg from the trained map in the output directory"};
  std::vector<std::pair<CLI::App*, Command>> registered;
  for (std::size_t i = 0; i < std::size(stage_commands); ++i) {
    auto* cmd = app.add_subcommand(stage_commands[i].first, descriptions[i]);
    add_common(cmd, flags);
    registered.emplace_back(cmd, stage_commands[i].second);
  }

  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  add_common(stats, flags);

  std::string embeddings, catalog, phrase;
  std::size_t n = 3;
  auto* neighbors = app.add_subcommand("neighbors", "Print the closest catalog concepts");
  neighbors->add_option("--embeddings", embeddings, "word2vec text file")->required();
  neighbors->add_option("--catalog", catalog, "catalog.tsv or one phrase per line")->required();
  neighbors->add_option("concept", phrase, "Concept phrase")->required();
  neighbors->add_option("-n", n, "Number of neighbors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels.empty()) docsom::kernels::select(docsom::kernels::parse_backend(kernels));
    for (auto& [cmd, fn] : registered) {
      if (cmd->parsed()) return fn(resolve_config(flags), std::cerr);
    }
    if (stats->parsed()) return docsom::cmd_stats(resolve_config(flags), std::cout);
    if (neighbors->parsed()) {
      return docsom::cmd_neighbors(embeddings, catalog, phrase, n, std::cout, std::cerr);
    }
  } catch (const docsom::StageError& e) {
    std::cerr << "error in stage " << e.stage() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
