#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/llm/gateway.hpp"
#include "metaforge/llm/prompts.hpp"
#include "metaforge/sql/features.hpp"
#include "metaforge/summarize/summarizer.hpp"

namespace metaforge::sql2text {

struct GeneratedQuestions {
  std::string sql;
  std::string long_question;
  std::string short_question;
  std::set<FieldRef> focused_fields;  // exactly the fields the query references
};

enum class RatingLevel { bad, bad_plus, good_minus, good, good_plus };

RatingLevel rating_from_string(std::string_view name);
std::string_view to_string(RatingLevel level);

struct QuestionRating {
  RatingLevel level;
  std::optional<std::string> note;
};

/// Derives a perfect focused schema by query analysis, then asks the model
/// for a long and a short question in one delimited reply (Q1::/Q2::; a
/// Step 1/Step 2 shape is tolerated). One retry on a malformed reply.
GeneratedQuestions generate_questions(const std::string& sql_text,
                                      const sql::SchemaMap& schema,
                                      const summarize::DescriptorStore& descriptors,
                                      llm::Gateway& gw, const llm::PromptSet& prompts,
                                      summarize::MetadataKind metadata_variant);

/// Splits a model reply into (long, short); empty optionals on failure.
std::optional<std::pair<std::string, std::string>> parse_question_pair(
    const std::string& response);

// --- feature-driven query sampling ---

struct FeaturePredicate {
  enum class Kind { table, field, join, constraint, named_field, group_by };
  Kind kind;
  std::string pattern;      // matched against normalized feature text
  bool substring = false;   // exact match by default

  bool matches(const sql::QueryFeatures& features) const;
};

/// A set FS of feature sets: a query is selected when some feature set is
/// entirely present in its features.
struct FeatureSelector {
  std::vector<std::vector<FeaturePredicate>> groups;
};

FeatureSelector selector_from_json(const std::string& text);

/// Union over fs in FS of the queries containing every feature in fs;
/// deduplicated, ordered by query id.
std::vector<std::string> select_queries_by_features(
    const std::vector<std::pair<std::string, sql::QueryFeatures>>& log,
    const FeatureSelector& selector);

// --- grading store ---

struct EvaluationRow {
  std::string sql;
  std::string long_question;
  std::string short_question;
  std::string reference_question;
  QuestionRating rating;
  std::string variant;  // metadata variant label
};

/// Appends one row to the JSONL evaluation store.
void grade_pair(const std::filesystem::path& store, const GeneratedQuestions& generated,
                const std::string& reference_question, const QuestionRating& rating,
                const std::string& variant);

std::vector<EvaluationRow> load_evaluation_rows(const std::filesystem::path& store);

/// Rating counts for one variant, in scale order.
std::map<RatingLevel, std::size_t> tally(const std::vector<EvaluationRow>& rows,
                                         const std::string& variant);

}  // namespace metaforge::sql2text
