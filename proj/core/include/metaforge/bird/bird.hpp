#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/gen/pipeline.hpp"
#include "metaforge/link/linker.hpp"
#include "metaforge/sql/joins.hpp"

namespace metaforge::bird {

/// <root>/<db_id>/<db_id>.sqlite plus database_description/*.csv.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path database_path(const std::string& db_id) const;
  std::optional<std::filesystem::path> description_dir(const std::string& db_id) const;
  std::vector<std::string> database_ids() const;
};

struct Question {
  int question_id = 0;
  std::string db_id;
  std::string question;
  std::string evidence;    // the oracle hint
  std::string difficulty;  // passthrough label
  std::string gold_sql;    // present in gold files ("SQL")
};

std::vector<Question> load_questions(const std::filesystem::path& file);

struct EvalRow {
  int question_id = 0;
  std::string gold_sql;
  std::string predicted_sql;
  bool match = false;
  std::string difficulty;
};

enum class SchemaMode { full, linked, perfect };

SchemaMode schema_mode_from_string(std::string_view name);

struct QueryLogEntry {
  std::string id;
  std::string db_id;  // empty for single-database logs
  std::string sql;
};

/// `.sql` (semicolon-separated statements) or JSONL [{id, db_id?, sql}].
std::vector<QueryLogEntry> load_query_log(const std::filesystem::path& file);

/// FK patch file: [{db, child_table, child_field, parent_table,
/// parent_field}] -> normalized pair strings with the db prefix.
std::set<std::string> load_fk_patch(const std::filesystem::path& file);

/// Unordered row-set equality of the two executed result sets (the
/// benchmark's execution-accuracy convention).
bool execution_match(const db::Database& database, const std::string& gold_sql,
                     const std::string& predicted_sql, std::int64_t timeout_ms = 30000);

/// The predicted-SQL interchange document: {"<question_id>": "<sql>"}.
std::string predictions_to_json(const std::map<int, std::string>& predictions);

// --- per-database store layout shared by the CLI and the eval harness ---

struct StorePaths {
  std::filesystem::path base;
  std::filesystem::path profiles() const { return base / "profiles"; }
  std::filesystem::path descriptors() const { return base / "descriptors.json"; }
  std::filesystem::path value_indexes() const { return base / "value_indexes.jsonl"; }
  std::filesystem::path semantic() const { return base / "semantic_index.json"; }
  std::filesystem::path few_shot() const { return base / "few_shot_index.json"; }
};

struct LoadedStores {
  profile::ProfileStore profiles;
  summarize::DescriptorStore descriptors;
  std::vector<index::ValueIndex> value_indexes;
  index::SemanticIndex semantic;
};

/// Loads every store, raising a not-found error that names the producing
/// subcommand when an upstream artifact is missing.
LoadedStores load_stores(const StorePaths& paths);

link::LinkStores make_link_stores(const LoadedStores& stores, const db::Database& database,
                                  std::size_t focused_top_m, double min_similarity);

link::LinkResult full_schema_link(const sql::SchemaMap& schema);
link::LinkResult perfect_schema_link(const std::string& gold_sql, const sql::SchemaMap& schema);

struct EvalConfig {
  Layout layout;
  std::filesystem::path stores_root;
  SchemaMode schema_mode = SchemaMode::linked;
  bool use_hints = true;
  int candidates = 3;
  int max_retry = 3;
  std::int64_t seed = 0;
  std::size_t few_shot = 8;
  std::size_t focused_top_m = 10;
  double min_similarity = 0.5;
  std::int64_t execution_timeout_ms = 30000;
  int workers = 1;
};

struct EvalOutput {
  std::vector<EvalRow> rows;                 // question order
  std::map<int, std::string> predictions;    // question_id -> SQL
  std::vector<std::string> failures;         // per-question error text, "" when fine
};

/// Scores generation against gold SQL by executing both and comparing
/// result sets. Per-question failures are reported, not fatal.
EvalOutput run_eval(const EvalConfig& config, const std::vector<Question>& questions,
                    llm::Gateway& gateway, const llm::PromptSet& prompts);

/// Writes predictions.json, eval_rows.jsonl and summary.json.
void write_eval_outputs(const std::filesystem::path& out_dir, const EvalOutput& output);

/// Deterministic worker-bounded parallel loop; results land in index order.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace metaforge::bird
