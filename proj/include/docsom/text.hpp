#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace docsom::text {

// Lowercases ASCII letters, splits on whitespace and strips leading/trailing
// ASCII punctuation from each token. Tokens that become empty are dropped.
// Bytes >= 0x80 pass through untouched, so UTF-8 text is preserved.
std::vector<std::string> tokenize(std::string_view text);

// Tokens of `text` joined with single spaces.
std::string normalize_phrase(std::string_view text);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

std::string_view trim(std::string_view s);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace docsom::text
