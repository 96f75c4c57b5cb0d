#pragma once

#include <set>
#include <string>
#include <string_view>

namespace metaforge::index {

/// Character k-grams of the lowercased, whitespace-normalized text.
/// Text shorter than k yields the whole text as a single shingle;
/// empty text yields the empty set.
std::set<std::string> shingles(std::string_view text, int k);

/// Exact Jaccard over shingle sets.
double shingle_jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

}  // namespace metaforge::index
