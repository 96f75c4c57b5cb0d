#pragma once

#include <set>
#include <string>
#include <vector>

#include "metaforge/db/sqlite.hpp"
#include "metaforge/sql/features.hpp"

namespace metaforge::sql {

/// "db.table.field=db.table.field" (db optional), lowercased, smaller side
/// first. normalize_join_pair(a,b) == normalize_join_pair(b,a).
std::string normalize_join_pair(const std::string& left, const std::string& right);

struct JoinDiff {
  std::set<std::string> documented;
  std::set<std::string> observed;
  std::set<std::string> undocumented_observed;  // observed - documented
  std::set<std::string> documented_unused;      // documented - observed
  std::size_t cross_name_count = 0;  // observed pairs whose field names differ
};

/// Harvests R.f=S.g equality join constraints across the log, normalizes
/// them like the documented set, and takes set differences both ways.
JoinDiff diff_join_constraints(const std::vector<QueryFeatures>& log_features,
                               const std::set<std::string>& documented_fks);

/// Multi-database variant: each log entry carries its database label, and
/// pairs are normalized with the "db." prefix.
JoinDiff diff_join_constraints_labeled(
    const std::vector<std::pair<std::string, const QueryFeatures*>>& log_features,
    const std::set<std::string>& documented_fks);

struct DocumentedFks {
  std::set<std::string> pairs;       // normalized (no db prefix)
  std::vector<std::string> warnings; // FK rows missing the referenced column
};

/// Declared foreign keys via PRAGMA foreign_key_list. Rows with an empty
/// referenced-column field become warnings and are excluded from the pairs.
DocumentedFks extract_documented_fks(const db::Database& database);

/// Count of pairs in `pairs` whose two field-name components differ.
std::size_t count_cross_name(const std::set<std::string>& pairs);

}  // namespace metaforge::sql
