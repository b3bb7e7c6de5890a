#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace folkrel {

/// Unicode NFC normalization followed by full lowercasing. Invalid UTF-8 is
/// rejected with std::invalid_argument. Pure ASCII input takes a fast path.
std::string normalize_tag(std::string_view tag);

/// Maps '-' to '_' (WordNet's multi-word convention).
std::string normalize_separators(std::string_view lemma);

std::vector<std::string_view> split(std::string_view text, char delimiter);

/// Fixed six-decimal rendering (glibc printf rounds ties to even).
std::string format_score(double value);

}  // namespace folkrel
