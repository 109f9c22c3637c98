#include "docsom/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "docsom/error.hpp"
#include "docsom/hashing.hpp"

namespace docsom {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"paths",
       {"documents", "annotations", "gazetteer", "embeddings", "output_dir", "embedding_cache"}},
      {"weighting", {"n_closest", "idf_log_base", "clamp_negative_sim"}},
      {"som",
       {"rows", "cols", "iterations", "eta0", "sigma_min", "topology", "seed",
        "normalize_inputs"}},
      {"render", {"cell_radius", "margin", "max_marker_fraction", "overlay"}},
      {"report", {"neighbors"}},
      {"run", {"threads"}},
  };
  return keys;
}

template <typename T>
T number(const std::string& section, const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof() || (std::is_unsigned_v<T> && value.find('-') != std::string::npos)) {
    throw Error(fmt::format("config [{}] {}: invalid value '{}'", section, key, value));
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

bool parse_bool(std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error(fmt::format("invalid boolean '{}'", value));
}

void PipelineConfig::validate() const {
  if (paths.documents.empty()) throw Error("config: [paths] documents is required");
  if (paths.embeddings.empty()) throw Error("config: [paths] embeddings is required");
  if (paths.output_dir.empty()) throw Error("config: [paths] output_dir is required");
  const bool has_ann = !paths.annotations.empty();
  const bool has_gaz = !paths.gazetteer.empty();
  if (has_ann == has_gaz) {
    throw Error("config: exactly one of [paths] annotations or gazetteer must be set");
  }
  if (report_neighbors < 1) throw Error("config: [report] neighbors must be >= 1");
  if (threads < 1) throw Error("config: [run] threads must be >= 1");
  weighting.validate();
  som.validate();
  render.validate();
}

std::string PipelineConfig::canonical_json() const {
  nlohmann::json j = {
      {"paths",
       {{"documents", paths.documents.string()},
        {"annotations", paths.annotations.string()},
        {"gazetteer", paths.gazetteer.string()},
        {"embeddings", paths.embeddings.string()},
        {"output_dir", paths.output_dir.string()},
        {"embedding_cache", paths.embedding_cache.string()}}},
      {"weighting",
       {{"n_closest", weighting.n_closest},
        {"idf_log_base", weighting.idf_log_base == LogBase::kNatural ? "natural" : "10"},
        {"clamp_negative_sim", weighting.clamp_negative_sim}}},
      {"som",
       {{"rows", som.rows},
        {"cols", som.cols},
        {"iterations", som.iterations},
        {"eta0", som.eta0},
        {"sigma_min", som.sigma_min},
        {"topology", topology_name(som.topology)},
        {"seed", som.seed},
        {"normalize_inputs", som.normalize_inputs}}},
      {"render",
       {{"cell_radius", render.cell_radius},
        {"margin", render.margin},
        {"max_marker_fraction", render.max_marker_fraction},
        {"overlay", render.overlay}}},
      {"report", {{"neighbors", report_neighbors}}},
  };
  return j.dump();
}

PipelineConfig parse_config(const std::string& ini_text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(fmt::format("config: {} (line {})", e.message(), e.line()));
  }

  PipelineConfig cfg;
  for (const auto& [section, body] : tree) {
    auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      throw Error(fmt::format("config: unknown section [{}]", section));
    }
    for (const auto& [key, node] : body) {
      if (!known->second.contains(key)) {
        throw Error(fmt::format("config: unknown key '{}' in [{}]", key, section));
      }
      const std::string value = node.get_value<std::string>();
      if (section == "paths") {
        const auto p = resolve(base_dir, value);
        if (key == "documents") cfg.paths.documents = p;
        else if (key == "annotations") cfg.paths.annotations = p;
        else if (key == "gazetteer") cfg.paths.gazetteer = p;
        else if (key == "embeddings") cfg.paths.embeddings = p;
        else if (key == "output_dir") cfg.paths.output_dir = p;
        else cfg.paths.embedding_cache = p;
      } else if (section == "weighting") {
        if (key == "n_closest") {
          cfg.weighting.n_closest = number<std::size_t>(section, key, value);
        } else if (key == "idf_log_base") {
          if (value == "natural" || value == "e") cfg.weighting.idf_log_base = LogBase::kNatural;
          else if (value == "10") cfg.weighting.idf_log_base = LogBase::kTen;
          else throw Error(fmt::format("config: idf_log_base must be natural or 10, got '{}'", value));
        } else {
          cfg.weighting.clamp_negative_sim = parse_bool(value);
        }
      } else if (section == "som") {
        if (key == "rows") cfg.som.rows = number<std::size_t>(section, key, value);
        else if (key == "cols") cfg.som.cols = number<std::size_t>(section, key, value);
        else if (key == "iterations") cfg.som.iterations = number<std::size_t>(section, key, value);
        else if (key == "eta0") cfg.som.eta0 = number<double>(section, key, value);
        else if (key == "sigma_min") cfg.som.sigma_min = number<double>(section, key, value);
        else if (key == "topology") cfg.som.topology = parse_topology(value);
        else if (key == "seed") cfg.som.seed = number<std::uint64_t>(section, key, value);
        else cfg.som.normalize_inputs = parse_bool(value);
      } else if (section == "render") {
        if (key == "cell_radius") cfg.render.cell_radius = number<double>(section, key, value);
        else if (key == "margin") cfg.render.margin = number<double>(section, key, value);
        else if (key == "max_marker_fraction") cfg.render.max_marker_fraction = number<double>(section, key, value);
        else cfg.render.overlay = parse_bool(value);
      } else if (section == "report") {
        cfg.report_neighbors = number<std::size_t>(section, key, value);
      } else {
        cfg.threads = number<unsigned>(section, key, value);
      }
    }
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  auto cfg = parse_config(read_file(path), path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace docsom
