#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/db/sqlite.hpp"
#include "metaforge/llm/gateway.hpp"
#include "metaforge/llm/prompts.hpp"
#include "metaforge/profile/profile.hpp"

namespace metaforge::summarize {

/// Which description text is rendered for a field in a schema context.
enum class MetadataKind { none, sme_only, minimal, maximal, full };

MetadataKind metadata_kind_from_string(std::string_view name);
std::string_view to_string(MetadataKind kind);

struct FieldDescriptor {
  std::string table;
  std::string field;
  std::optional<std::string> sme_metadata;
  std::optional<std::string> short_summary;
  std::optional<std::string> long_summary;
  std::string profile_ref;  // table key in the profile store

  FieldRef ref() const { return {table, field}; }
};

enum class SummaryLength { short_form, long_form };

/// Short: the model's one-to-two-sentence meaning description from the
/// rendered profile plus schema context. Long: the short text with a
/// template-assembled statistics sentence appended, so every number is the
/// profile's own.
std::string summarize_field(const profile::FieldProfile& p,
                            const std::vector<std::string>& table_schema,
                            const std::optional<std::string>& sme_metadata, llm::Gateway& gw,
                            const llm::PromptSet& prompts, SummaryLength length);

/// The mechanically appended statistics clause of a long summary.
std::string statistics_clause(const profile::FieldProfile& p);

/// Builds one descriptor per profiled column of every table in the
/// database. SME metadata joins by (table, original column name) from the
/// description CSVs when a directory is given.
std::vector<FieldDescriptor> build_descriptors(const db::Database& database,
                                               const profile::ProfileStore& profiles,
                                               const std::optional<std::filesystem::path>& sme_csv_dir,
                                               llm::Gateway& gw, const llm::PromptSet& prompts);

/// Description CSVs keyed by lowercased (table, original_column_name).
std::map<std::pair<std::string, std::string>, std::string> load_sme_metadata(
    const std::filesystem::path& dir);

class DescriptorStore {
 public:
  static DescriptorStore load(const std::filesystem::path& file);
  static DescriptorStore from_descriptors(std::vector<FieldDescriptor> descriptors);

  void save(const std::filesystem::path& file) const;
  const FieldDescriptor* find(const FieldRef& ref) const;  // case-insensitive
  const std::vector<FieldDescriptor>& all() const { return descriptors_; }

 private:
  std::vector<FieldDescriptor> descriptors_;  // sorted by (table, field)
};

std::string to_json(const std::vector<FieldDescriptor>& descriptors);

}  // namespace metaforge::summarize
