#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace metaforge::strings {

/// Shortest round-trip decimal form of a double.
std::string canonical_real(double value);

std::string canonical_int(long long value);

/// Lowercase hex of a blob.
std::string hex_encode(std::string_view bytes);

/// ASCII-lowercase copy.
std::string to_lower(std::string_view text);

bool iequals(std::string_view a, std::string_view b);

/// Collapse whitespace runs to single spaces and trim the ends.
std::string normalize_whitespace(std::string_view text);

/// Lowercased, whitespace-normalized form used for literal matching.
std::string normalize_for_match(std::string_view text);

/// True when the text matches an integer-or-decimal pattern
/// ([+-]?digits[.digits]).
bool looks_numeric(std::string_view text);

std::string trim(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);

/// Replace invalid UTF-8 byte sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

/// Join with a separator.
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Extract candidate literals from free text: single- and double-quoted
/// spans plus capitalized multi-word spans (lowercase connectives allowed
/// inside a span). Order of first occurrence, deduplicated.
std::vector<std::string> extract_literals(std::string_view text);

}  // namespace metaforge::strings
