#pragma once

// Pipeline configuration: an INI file with [paths], [weighting], [som],
// [render], [report] and [run] sections. Relative paths resolve against the
// directory holding the config file. See docs/config.md for the schema.

#include <filesystem>
#include <optional>
#include <string>

#include "docsom/render.hpp"
#include "docsom/som.hpp"
#include "docsom/vectorizer.hpp"

namespace docsom {

struct PipelinePaths {
  std::filesystem::path documents;
  std::filesystem::path annotations;  // exactly one of annotations / gazetteer
  std::filesystem::path gazetteer;
  std::filesystem::path embeddings;
  std::filesystem::path output_dir;
  std::filesystem::path embedding_cache;  // optional
};

struct PipelineConfig {
  PipelinePaths paths;
  WeightingConfig weighting;
  SomConfig som;
  RenderSpec render;
  std::size_t report_neighbors = 3;
  unsigned threads = 1;
  std::filesystem::path source;  // config file, empty when built in code

  void validate() const;
  // Canonical JSON of every effective setting; hashed into run manifests.
  std::string canonical_json() const;
};

PipelineConfig parse_config(const std::string& ini_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

bool parse_bool(std::string_view value);

}  // namespace docsom
