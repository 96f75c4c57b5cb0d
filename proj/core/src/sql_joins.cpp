#include "metaforge/sql/joins.hpp"

#include <algorithm>

#include "metaforge/util/strings.hpp"

namespace metaforge::sql {

std::string normalize_join_pair(const std::string& left, const std::string& right) {
  std::string a = strings::to_lower(left);
  std::string b = strings::to_lower(right);
  if (b < a) std::swap(a, b);
  return a + "=" + b;
}

namespace {

JoinDiff diff_impl(std::set<std::string> observed, const std::set<std::string>& documented) {
  JoinDiff diff;
  diff.documented = documented;
  diff.observed = std::move(observed);
  std::set_difference(diff.observed.begin(), diff.observed.end(), diff.documented.begin(),
                      diff.documented.end(),
                      std::inserter(diff.undocumented_observed,
                                    diff.undocumented_observed.begin()));
  std::set_difference(diff.documented.begin(), diff.documented.end(), diff.observed.begin(),
                      diff.observed.end(),
                      std::inserter(diff.documented_unused, diff.documented_unused.begin()));
  diff.cross_name_count = count_cross_name(diff.observed);
  return diff;
}

}  // namespace

JoinDiff diff_join_constraints(const std::vector<QueryFeatures>& log_features,
                               const std::set<std::string>& documented_fks) {
  std::set<std::string> observed;
  for (const auto& features : log_features) {
    auto pairs = features.equality_join_pairs();
    observed.insert(pairs.begin(), pairs.end());
  }
  return diff_impl(std::move(observed), documented_fks);
}

JoinDiff diff_join_constraints_labeled(
    const std::vector<std::pair<std::string, const QueryFeatures*>>& log_features,
    const std::set<std::string>& documented_fks) {
  std::set<std::string> observed;
  for (const auto& [db, features] : log_features) {
    auto pairs = features->equality_join_pairs(db);
    observed.insert(pairs.begin(), pairs.end());
  }
  return diff_impl(std::move(observed), documented_fks);
}

DocumentedFks extract_documented_fks(const db::Database& database) {
  DocumentedFks result;
  for (const auto& table : database.table_names()) {
    for (const auto& fk : database.foreign_keys(table)) {
      if (fk.parent_column.empty()) {
        result.warnings.push_back("foreign key on " + fk.child_table + "." + fk.child_column +
                                  " references " + fk.parent_table +
                                  " without naming the referenced column");
        continue;
      }
      result.pairs.insert(
          normalize_join_pair(fk.child_table + "." + fk.child_column,
                              fk.parent_table + "." + fk.parent_column));
    }
  }
  return result;
}

std::size_t count_cross_name(const std::set<std::string>& pairs) {
  std::size_t count = 0;
  for (const auto& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos) continue;
    auto field_of = [](std::string_view side) {
      auto dot = side.rfind('.');
      return dot == std::string_view::npos ? side : side.substr(dot + 1);
    };
    if (field_of(std::string_view(pair).substr(0, eq)) !=
        field_of(std::string_view(pair).substr(eq + 1)))
      ++count;
  }
  return count;
}

}  // namespace metaforge::sql
