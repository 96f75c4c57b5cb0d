#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/index/semantic.hpp"
#include "metaforge/index/value_index.hpp"
#include "metaforge/llm/gateway.hpp"
#include "metaforge/llm/prompts.hpp"
#include "metaforge/sql/resolve.hpp"
#include "metaforge/summarize/summarizer.hpp"

namespace metaforge::link {

enum class SchemaScope { focused, full };

struct SchemaVariant {
  SchemaScope scope;
  summarize::MetadataKind metadata;

  std::string label() const;
};

/// The five context variants the linker generates SQL under.
const std::array<SchemaVariant, 5>& all_variants();

struct LinkRequest {
  std::string question;
  std::optional<std::string> oracle_hint;
  int max_retry = 3;
  std::int64_t seed = 0;
};

struct FocusedSchema {
  std::vector<FieldRef> fields;  // semantic rank first, then literal additions
};

struct VariantOutcome {
  std::string variant;
  std::string final_sql;
  std::set<FieldRef> fields;
  std::set<std::string> literals;
  int retries_used = 0;
  std::vector<std::string> unresolved_literals;
  bool parsed = false;
  std::vector<std::string> notes;  // dropped hallucinated columns, parse failures
};

struct LinkResult {
  std::set<FieldRef> fields;       // union over variants
  std::set<std::string> literals;  // union over variants
  std::map<std::string, VariantOutcome> per_variant;
};

/// Everything link_schema reads; built once per database.
struct LinkStores {
  const summarize::DescriptorStore* descriptors = nullptr;
  const profile::ProfileStore* profiles = nullptr;
  const std::vector<index::ValueIndex>* value_indexes = nullptr;
  const index::SemanticIndex* semantic = nullptr;
  sql::SchemaMap schema;
  std::set<std::string> fk_pairs;  // normalized table.field=table.field
  std::size_t focused_top_m = 10;
  double literal_min_similarity = 0.5;
};

/// Union of the semantic top-m and the fields containing each literal
/// extracted from the question.
FocusedSchema compute_focused_schema(const std::string& question,
                                     const index::SemanticIndex& semantic,
                                     const std::vector<index::ValueIndex>& value_indexes,
                                     llm::Gateway& gw, std::size_t top_m,
                                     double min_similarity = 0.5);

/// One "Field <table>.<field> means: <text>" line per field, back-quoting
/// identifiers that need it, plus a joins sentence for documented key pairs.
/// Missing descriptors fall back to the rendered profile text.
std::string render_schema_context(const std::vector<FieldRef>& fields,
                                  const summarize::DescriptorStore& descriptors,
                                  summarize::MetadataKind kind,
                                  const std::set<std::string>& fk_pairs,
                                  const profile::ProfileStore* profiles = nullptr);

/// The five-variant linking loop with literal repair. Throws
/// Error(linking_failed) only when every variant failed to produce
/// parseable SQL.
LinkResult link_schema(const LinkRequest& req, const LinkStores& stores, llm::Gateway& gw,
                       const llm::PromptSet& prompts);

std::string to_json(const LinkResult& result);

/// Strips markdown fences and trailing semicolons from a model reply.
std::string extract_sql_from_response(const std::string& response);

}  // namespace metaforge::link
