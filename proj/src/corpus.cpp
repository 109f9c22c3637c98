#include "docsom/corpus.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>

#include <fmt/format.h>

#include "docsom/error.hpp"
#include "docsom/hashing.hpp"
#include "docsom/text.hpp"

namespace docsom {
namespace {

using nlohmann::json;

// Calls fn(line, line_number) for each non-blank line.
template <typename Fn>
void for_each_line(std::string_view contents, Fn&& fn) {
  std::size_t line_no = 0;
  while (!contents.empty()) {
    ++line_no;
    const std::size_t nl = contents.find('\n');
    std::string_view line = contents.substr(0, nl);
    contents.remove_prefix(nl == std::string_view::npos ? contents.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    fn(line, line_no);
  }
}

json parse_record(std::string_view line, std::string_view source, std::size_t line_no) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("{}:{}: malformed JSON record ({})", source, line_no, e.what()));
  }
  if (!record.is_object()) {
    throw Error(fmt::format("{}:{}: expected a JSON object", source, line_no));
  }
  return record;
}

std::string string_field(const json& record, const char* key, std::string_view source,
                         std::size_t line_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw Error(fmt::format("{}:{}: missing or non-string field '{}'", source, line_no, key));
  }
  return it->get<std::string>();
}

}  // namespace

ConceptCatalog::ConceptCatalog(std::vector<std::string> phrases) {
  for (auto& p : phrases) {
    p = text::normalize_phrase(p);
    if (p.empty()) throw Error("concept phrase is empty after normalization");
  }
  std::sort(phrases.begin(), phrases.end());
  phrases.erase(std::unique(phrases.begin(), phrases.end()), phrases.end());
  phrases_ = std::move(phrases);
  tokens_.reserve(phrases_.size());
  for (std::size_t i = 0; i < phrases_.size(); ++i) {
    tokens_.push_back(text::tokenize(phrases_[i]));
    index_.emplace(phrases_[i], i);
  }
}

std::optional<std::size_t> ConceptCatalog::find(std::string_view phrase) const {
  auto it = index_.find(text::normalize_phrase(phrase));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CorpusStats::term_frequency(std::size_t doc, std::size_t concept_index) const {
  const auto& terms = tf.at(doc);
  auto it = std::lower_bound(
      terms.begin(), terms.end(), concept_index,
      [](const ConceptCount& c, std::size_t idx) { return c.concept_index < idx; });
  return (it != terms.end() && it->concept_index == concept_index) ? it->tf : 0;
}

Gazetteer::Gazetteer(const std::vector<std::string>& phrases) {
  for (const auto& p : phrases) {
    auto tokens = text::tokenize(p);
    if (tokens.empty()) throw Error("gazetteer phrase '" + p + "' is empty after normalization");
    max_tokens_ = std::max(max_tokens_, tokens.size());
    phrases_.insert(text::join(tokens));
  }
}

std::vector<Document> parse_documents(std::string_view jsonl, std::string_view source) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    const json record = parse_record(line, source, line_no);
    Document doc{string_field(record, "id", source, line_no),
                 string_field(record, "title", source, line_no),
                 string_field(record, "abstract", source, line_no)};
    if (doc.id.empty()) throw Error(fmt::format("{}:{}: empty document id", source, line_no));
    if (!seen.insert(doc.id).second) {
      throw Error(fmt::format("{}:{}: duplicate document id \"{}\"", source, line_no, doc.id));
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  return parse_documents(read_file(path), path.string());
}

std::vector<ConceptAnnotation> parse_annotations(std::string_view jsonl,
                                                 const std::vector<Document>& docs,
                                                 std::string_view source) {
  std::unordered_set<std::string> known;
  for (const auto& d : docs) known.insert(d.id);

  std::vector<ConceptAnnotation> out;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    const json record = parse_record(line, source, line_no);
    ConceptAnnotation a;
    a.doc_id = string_field(record, "doc_id", source, line_no);
    const std::string raw = string_field(record, "preferred", source, line_no);
    auto count_it = record.find("count");
    if (count_it == record.end() || !count_it->is_number_integer()) {
      throw Error(fmt::format("{}:{}: missing or non-integer field 'count'", source, line_no));
    }
    const auto count = count_it->get<long long>();
    if (count < 1) {
      throw Error(fmt::format("{}:{}: count must be >= 1, got {}", source, line_no, count));
    }
    if (!known.contains(a.doc_id)) {
      throw Error(fmt::format("{}:{}: unknown doc_id \"{}\"", source, line_no, a.doc_id));
    }
    a.preferred = text::normalize_phrase(raw);
    if (a.preferred.empty()) {
      throw Error(fmt::format("{}:{}: preferred phrase is empty", source, line_no));
    }
    auto surface_it = record.find("surface");
    a.surface = (surface_it != record.end() && surface_it->is_string())
                    ? surface_it->get<std::string>()
                    : raw;
    a.count = static_cast<int>(count);

    auto [it, inserted] = slot.try_emplace({a.doc_id, a.preferred}, out.size());
    if (inserted) {
      out.push_back(std::move(a));
    } else {
      out[it->second].count += a.count;
    }
  });
  return out;
}

std::vector<ConceptAnnotation> load_annotations(const std::filesystem::path& path,
                                                const std::vector<Document>& docs) {
  return parse_annotations(read_file(path), docs, path.string());
}

std::string format_annotations(const std::vector<ConceptAnnotation>& annotations) {
  std::string out;
  for (const auto& a : annotations) {
    json record = {{"doc_id", a.doc_id},
                   {"surface", a.surface},
                   {"preferred", a.preferred},
                   {"count", a.count}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<std::string> parse_gazetteer(std::string_view contents, std::string_view source) {
  std::vector<std::string> phrases;
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    line = text::trim(line);
    if (line.front() == '#') return;
    std::string phrase = text::normalize_phrase(line);
    if (phrase.empty()) {
      throw Error(fmt::format("{}:{}: phrase is empty after normalization", source, line_no));
    }
    phrases.push_back(std::move(phrase));
  });
  return phrases;
}

std::vector<std::string> load_gazetteer(const std::filesystem::path& path) {
  return parse_gazetteer(read_file(path), path.string());
}

std::vector<ConceptAnnotation> extract_concepts(const Document& doc, const Gazetteer& gazetteer) {
  const auto tokens = text::tokenize(doc.text());
  std::map<std::string, ConceptAnnotation> found;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    std::size_t matched = 0;
    const std::size_t longest = std::min(gazetteer.max_tokens(), tokens.size() - pos);
    std::string candidate;
    for (std::size_t len = longest; len >= 1; --len) {
      candidate.clear();
      for (std::size_t k = 0; k < len; ++k) {
        if (k > 0) candidate.push_back(' ');
        candidate += tokens[pos + k];
      }
      if (gazetteer.contains(candidate)) {
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      ++pos;
      continue;
    }
    auto [it, inserted] = found.try_emplace(candidate);
    if (inserted) {
      it->second = ConceptAnnotation{doc.id, candidate, candidate, 1};
    } else {
      ++it->second.count;
    }
    pos += matched;
  }
  std::vector<ConceptAnnotation> out;
  out.reserve(found.size());
  for (auto& [phrase, a] : found) out.push_back(std::move(a));
  return out;
}

std::vector<ConceptAnnotation> extract_all(const std::vector<Document>& docs,
                                           const Gazetteer& gazetteer) {
  std::vector<ConceptAnnotation> out;
  for (const auto& doc : docs) {
    auto found = extract_concepts(doc, gazetteer);
    out.insert(out.end(), std::make_move_iterator(found.begin()),
               std::make_move_iterator(found.end()));
  }
  return out;
}

CorpusBuild build_catalog_and_stats(const std::vector<Document>& docs,
                                    const std::vector<ConceptAnnotation>& annotations) {
  if (annotations.empty()) throw Error("no concept annotations: nothing to cluster");

  std::unordered_map<std::string, std::size_t> doc_pos;
  for (std::size_t i = 0; i < docs.size(); ++i) doc_pos.emplace(docs[i].id, i);

  std::vector<std::string> phrases;
  phrases.reserve(annotations.size());
  for (const auto& a : annotations) {
    if (!doc_pos.contains(a.doc_id)) {
      throw Error("annotation references unknown document \"" + a.doc_id + "\"");
    }
    if (a.count < 1) throw Error("annotation count must be >= 1 for \"" + a.doc_id + "\"");
    phrases.push_back(a.preferred);
  }

  CorpusBuild out;
  out.catalog = ConceptCatalog(std::move(phrases));

  std::vector<std::map<std::size_t, int>> per_doc(docs.size());
  for (const auto& a : annotations) {
    const std::size_t idx = *out.catalog.find(a.preferred);
    per_doc[doc_pos.at(a.doc_id)][idx] += a.count;
  }

  out.stats.df.assign(out.catalog.size(), 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (per_doc[d].empty()) {
      out.excluded.push_back(docs[d].id);
      continue;
    }
    out.stats.doc_ids.push_back(docs[d].id);
    auto& terms = out.stats.tf.emplace_back();
    for (const auto& [idx, count] : per_doc[d]) {
      terms.push_back({idx, count});
      ++out.stats.df[idx];
    }
  }
  return out;
}

std::string format_exclusions(const std::vector<std::string>& excluded) {
  std::string out;
  for (const auto& id : excluded) {
    out += id;
    out += '\n';
  }
  return out;
}

std::string format_catalog(const ConceptCatalog& catalog, const CorpusStats& stats) {
  std::string out = "index\tphrase\tdf\twords\n";
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    out += fmt::format("{}\t{}\t{}\t{}\n", i, catalog.phrase(i),
                       i < stats.df.size() ? stats.df[i] : 0, catalog.tokens(i).size());
  }
  return out;
}

ConceptCatalog load_catalog(const std::filesystem::path& path) {
  const std::string contents = read_file(path);
  if (contents.rfind("index\tphrase", 0) != 0) {
    return ConceptCatalog(parse_gazetteer(contents, path.string()));
  }
  std::vector<std::string> phrases;
  bool header = true;
  for_each_line(contents, [&](std::string_view line, std::size_t line_no) {
    if (header) {
      header = false;
      return;
    }
    const auto first = line.find('\t');
    const auto second = first == std::string_view::npos ? first : line.find('\t', first + 1);
    if (second == std::string_view::npos) {
      throw Error(fmt::format("{}:{}: expected tab-separated catalog row", path.string(), line_no));
    }
    phrases.emplace_back(line.substr(first + 1, second - first - 1));
  });
  return ConceptCatalog(std::move(phrases));
}

}  // namespace docsom
