#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/db/sqlite.hpp"
#include "metaforge/link/linker.hpp"
#include "metaforge/llm/gateway.hpp"
#include "metaforge/llm/prompts.hpp"
#include "metaforge/sql/parse.hpp"
#include "metaforge/summarize/summarizer.hpp"

namespace metaforge::gen {

enum class LintRule {
  null_order_asc,
  null_min_aggregate,
  minmax_via_subquery,
  string_catenation_output,
};

std::string_view to_string(LintRule rule);

struct LintFlag {
  LintRule rule;
  std::string location;  // expression path, e.g. "select[0]", "order_by[1]"
};

/// Executed rows as canonical strings; NULL uses a reserved token that
/// cannot collide with text cells.
struct ResultSet {
  std::vector<std::vector<std::string>> rows;
  std::set<std::vector<std::string>> as_set;

  bool set_equal(const ResultSet& other) const { return as_set == other.as_set; }
};

inline constexpr const char* kNullToken = "\x01NULL";

ResultSet execute_sql(const db::Database& database, const std::string& sql,
                      std::int64_t timeout_ms = 30000);

struct SqlCandidate {
  std::string sql;
  std::int64_t seed = 0;
  std::uint64_t schema_order_permutation = 0;
  bool parse_ok = false;
  std::vector<std::string> diagnostics;
  std::vector<LintFlag> lint_flags;
  int correction_rounds = 0;
  std::optional<ResultSet> execution;
  bool failed = false;  // gateway failure
};

/// Deterministic prompt: linked fields rendered with maximal metadata in
/// the permutation induced by shuffle_seed, few-shot pairs, then the
/// question and optional hint.
std::string build_prompt(const std::string& question, const std::optional<std::string>& hint,
                         const link::LinkResult& link,
                         const std::vector<std::pair<std::string, std::string>>& few_shot,
                         const summarize::DescriptorStore& descriptors,
                         const llm::PromptSet& prompts, std::uint64_t shuffle_seed,
                         const std::set<std::string>& fk_pairs = {});

struct Validation {
  bool parse_ok = false;
  std::vector<std::string> diagnostics;
  std::optional<sql::QueryAst> ast;
};

/// Parse plus referenced-table/column checks against the live schema.
Validation validate_sql(const std::string& sql_text, const sql::SchemaMap& schema);

/// column key ("table.field" lowercased) -> may contain NULL.
using NullabilityMap = std::map<std::string, bool>;

/// Profile-driven nullability (null_count > 0), falling back to schema
/// NOT NULL declarations for unprofiled columns.
NullabilityMap build_nullability(const db::Database& database,
                                 const profile::ProfileStore* profiles);

std::vector<LintFlag> lint_sql(const sql::QueryAst& ast, const sql::SchemaMap& schema,
                               const NullabilityMap& nullability);

struct GenerateConfig {
  int candidates = 3;
  int correction_budget = 3;
  std::int64_t seed = 0;
  std::int64_t execution_timeout_ms = 30000;
};

std::vector<SqlCandidate> generate_candidates(
    const std::string& question, const std::optional<std::string>& hint,
    const link::LinkResult& link,
    const std::vector<std::pair<std::string, std::string>>& few_shot,
    const summarize::DescriptorStore& descriptors, llm::Gateway& gw,
    const llm::PromptSet& prompts, const db::Database& database,
    const profile::ProfileStore* profiles, const GenerateConfig& config,
    const std::set<std::string>& fk_pairs = {});

/// Executes candidates, compares result sets, and picks the lowest-index
/// member of the largest agreeing group (>=2). With no agreement the pick
/// is seeded-random among executed candidates; with none executed, the
/// lowest-index parseable candidate, else index 0.
std::size_t majority_vote_index(std::vector<SqlCandidate>& candidates,
                                const db::Database& database, std::int64_t seed,
                                std::int64_t timeout_ms = 30000);

SqlCandidate majority_vote(std::vector<SqlCandidate> candidates, const db::Database& database,
                           std::int64_t seed, std::int64_t timeout_ms = 30000);

}  // namespace metaforge::gen
