#include "docsom/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "docsom/error.hpp"
#include "docsom/hashing.hpp"
#include "docsom/kernels.hpp"
#include "docsom/parallel.hpp"
#include "docsom/text.hpp"

namespace docsom {
namespace {

constexpr char kCacheMagic[8] = {'D', 'S', 'O', 'M', 'E', 'M', 'B', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
  }
  return out;
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    std::size_t end = i;
    while (end < line.size() && !is_blank(line[end])) ++end;
    if (end > i) fields.push_back(line.substr(i, end - i));
    i = end;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <typename T>
void put(std::string& buf, const T& value) {
  buf.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::string_view& buf, T& value) {
  if (buf.size() < sizeof(T)) return false;
  std::memcpy(&value, buf.data(), sizeof(T));
  buf.remove_prefix(sizeof(T));
  return true;
}

}  // namespace

bool EmbeddingTable::add(std::string_view token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw Error(fmt::format("embedding for '{}' has {} components, expected {}", token,
                            vector.size(), dim_));
  }
  std::string key = lowercase(token);
  if (index_.contains(key)) return false;
  index_.emplace(key, tokens_.size());
  tokens_.push_back(std::move(key));
  values_.insert(values_.end(), vector.begin(), vector.end());
  return true;
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(lowercase(token));
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(values_.data() + it->second * dim_, dim_);
}

EmbeddingTable parse_embeddings(std::string_view contents, std::string_view source,
                                const std::unordered_set<std::string>* vocabulary) {
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (contents.empty()) return false;
    const std::size_t nl = contents.find('\n');
    line = contents.substr(0, nl);
    contents.remove_prefix(nl == std::string_view::npos ? contents.size() : nl + 1);
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(fmt::format("{}: empty embedding file", source));
  const auto header = split_fields(line);
  std::size_t declared = 0, dim = 0;
  if (header.size() != 2 || !parse_number(header[0], declared) || !parse_number(header[1], dim) ||
      dim == 0) {
    throw Error(fmt::format("{}:1: expected header '<count> <dim>'", source));
  }

  EmbeddingTable table(dim);
  std::vector<double> row(dim);
  std::size_t rows = 0;
  while (next_line(line)) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    ++rows;
    if (fields.size() != dim + 1) {
      throw Error(fmt::format("{}:{}: expected {} components, found {}", source, line_no, dim,
                              fields.size() - 1));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(fields[k + 1], row[k]) || !std::isfinite(row[k])) {
        throw Error(fmt::format("{}:{}: non-numeric component '{}'", source, line_no,
                                fields[k + 1]));
      }
    }
    const std::string token = lowercase(fields[0]);
    if (vocabulary != nullptr && !vocabulary->contains(token)) continue;
    if (!table.add(token, row)) {
      table.warnings.push_back(
          fmt::format("{}:{}: duplicate token '{}' ignored (first occurrence kept)", source,
                      line_no, token));
    }
  }
  if (rows != declared) {
    throw Error(fmt::format("{}: header declares {} rows, found {}", source, declared, rows));
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::unordered_set<std::string>* vocabulary) {
  return parse_embeddings(read_file(path), path.string(), vocabulary);
}

void write_embedding_cache(const EmbeddingTable& table, const std::filesystem::path& path,
                           std::string_view key) {
  std::string buf(kCacheMagic, sizeof(kCacheMagic));
  put(buf, kCacheVersion);
  put(buf, static_cast<std::uint64_t>(key.size()));
  buf.append(key);
  put(buf, static_cast<std::uint64_t>(table.dim()));
  put(buf, static_cast<std::uint64_t>(table.size()));
  for (const auto& token : table.tokens()) {
    put(buf, static_cast<std::uint64_t>(token.size()));
    buf.append(token);
    const std::span<const double> values = *table.find(token);
    for (double v : values) put(buf, v);
  }
  write_file(path, buf);
}

std::optional<EmbeddingTable> read_embedding_cache(const std::filesystem::path& path,
                                                   std::string_view key) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  const std::string contents = read_file(path);
  std::string_view buf = contents;
  if (buf.size() < sizeof(kCacheMagic) ||
      std::memcmp(buf.data(), kCacheMagic, sizeof(kCacheMagic)) != 0) {
    return std::nullopt;
  }
  buf.remove_prefix(sizeof(kCacheMagic));
  std::uint32_t version = 0;
  std::uint64_t key_len = 0, dim = 0, count = 0;
  if (!get(buf, version) || version != kCacheVersion || !get(buf, key_len) ||
      buf.size() < key_len || buf.substr(0, key_len) != key) {
    return std::nullopt;
  }
  buf.remove_prefix(key_len);
  if (!get(buf, dim) || !get(buf, count) || dim == 0) return std::nullopt;
  EmbeddingTable table(dim);
  std::vector<double> row(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t len = 0;
    if (!get(buf, len) || buf.size() < len) return std::nullopt;
    const std::string token(buf.substr(0, len));
    buf.remove_prefix(len);
    for (auto& v : row) {
      if (!get(buf, v)) return std::nullopt;
    }
    table.add(token, row);
  }
  return table;
}

ConceptVector concept_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                             std::size_t concept_index) {
  ConceptVector out;
  out.concept_index = concept_index;
  out.total_words = tokens.size();
  out.vector.assign(table.dim(), 0.0);
  for (const auto& token : tokens) {
    if (auto v = table.find(token)) {
      kernels::accumulate(out.vector, *v);
      ++out.covered_words;
    }
  }
  return out;
}

std::vector<ConceptVector> build_all_concept_vectors(const ConceptCatalog& catalog,
                                                     const EmbeddingTable& table,
                                                     unsigned threads) {
  if (catalog.empty()) throw Error("concept catalog is empty");
  std::vector<ConceptVector> out(catalog.size());
  parallel_for(catalog.size(), threads,
               [&](std::size_t i) { out[i] = concept_vector(catalog.tokens(i), table, i); });
  return out;
}

CoverageSummary summarize_coverage(const std::vector<ConceptVector>& vectors) {
  CoverageSummary s;
  for (const auto& v : vectors) {
    if (v.uncovered()) {
      ++s.uncovered;
    } else if (v.covered_words == v.total_words) {
      ++s.full;
    } else {
      ++s.partial;
    }
  }
  return s;
}

std::unordered_set<std::string> catalog_vocabulary(const ConceptCatalog& catalog) {
  std::unordered_set<std::string> vocab;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    for (const auto& t : catalog.tokens(i)) vocab.insert(t);
  }
  return vocab;
}

}  // namespace docsom
