#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/db/sqlite.hpp"
#include "metaforge/profile/minhash.hpp"

namespace metaforge::profile {

enum class AlphabetClass { digits, upper, lower, punctuation, whitespace, other };

std::string_view to_string(AlphabetClass c);

/// Value-shape statistics over the non-NULL values of a column.
/// When a column has no non-NULL values the lengths are zero,
/// fixed_length is present (min == max) and all_numeric_looking is
/// vacuously true; rendering gates shape clauses on having values.
struct ShapeSummary {
  std::optional<std::size_t> fixed_length;
  std::size_t length_min = 0;
  std::size_t length_max = 0;
  bool all_numeric_looking = false;
  std::set<AlphabetClass> alphabet_classes;
  std::optional<std::string> common_prefix;
};

struct FieldProfile {
  std::string table;
  std::string field;
  std::uint64_t record_count = 0;
  std::uint64_t null_count = 0;
  std::uint64_t distinct_count = 0;
  std::optional<std::string> min_value;  // lexicographic over canonical strings
  std::optional<std::string> max_value;
  std::vector<std::pair<std::string, std::uint64_t>> top_k;  // count desc, value asc
  ShapeSummary shape;
  MinHashSketch sketch;

  FieldRef ref() const { return {table, field}; }
};

struct ProfileConfig {
  std::uint32_t k = 256;
  std::uint32_t top_k = 10;
  std::uint64_t seed_base = kDefaultSeedBase;
};

struct TableProfile {
  std::string table;
  std::vector<FieldProfile> fields;  // declared column order
  std::vector<std::string> warnings;
};

/// Single pass over the table computing exact counts, lexicographic
/// min/max over canonical strings, top-k (ties by ascending value),
/// shape, and the minhash sketch. NULLs count only toward null_count.
/// Throws Error(not_found) for an unknown table.
TableProfile profile_table(const db::Database& db, const std::string& table,
                           const ProfileConfig& config = {});

/// Deterministic template-based paragraph over the profile statistics.
/// Clauses appear only when their underlying flag holds and the column
/// has at least one non-NULL value.
std::string render_profile_english(const FieldProfile& p);

/// Corpus fields whose resemblance estimate reaches `threshold`, sorted by
/// descending estimate then field identifier; the target itself is skipped.
/// Incompatible sketches are skipped with a warning instead of aborting.
struct JoinableField {
  FieldRef field;
  ResemblanceEstimate estimate;
};
struct JoinScan {
  std::vector<JoinableField> matches;
  std::vector<std::string> warnings;
};
JoinScan find_joinable_fields(const FieldProfile& target,
                              const std::vector<FieldProfile>& corpus, double threshold);

// --- profile store: one JSON document per table, "profile_version": 1 ---

std::string to_json(const TableProfile& profile);
TableProfile table_profile_from_json(const std::string& text);

class ProfileStore {
 public:
  /// Loads every "<table>.json" in `dir`.
  static ProfileStore load(const std::filesystem::path& dir);

  void put(TableProfile profile);
  void save(const std::filesystem::path& dir) const;

  const TableProfile* table(const std::string& table) const;
  const FieldProfile* field(const FieldRef& ref) const;  // case-insensitive
  std::vector<const FieldProfile*> all_fields() const;   // (table, field) order
  std::vector<std::string> table_names() const;

 private:
  std::map<std::string, TableProfile> tables_;
};

}  // namespace metaforge::profile
