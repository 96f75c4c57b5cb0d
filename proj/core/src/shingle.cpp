#include "metaforge/index/shingle.hpp"

#include <algorithm>

#include "metaforge/util/strings.hpp"

namespace metaforge::index {

std::set<std::string> shingles(std::string_view text, int k) {
  std::set<std::string> out;
  std::string norm = strings::normalize_for_match(text);
  if (norm.empty()) return out;
  if (norm.size() <= static_cast<std::size_t>(k)) {
    out.insert(norm);
    return out;
  }
  for (std::size_t i = 0; i + k <= norm.size(); ++i) {
    out.insert(norm.substr(i, k));
  }
  return out;
}

double shingle_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t intersection = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) {
      ++intersection;
      ++ia;
      ++ib;
    } else if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return static_cast<double>(intersection) /
         static_cast<double>(a.size() + b.size() - intersection);
}

}  // namespace metaforge::index
