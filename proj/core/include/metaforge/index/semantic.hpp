#pragma once

#include <map>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/llm/gateway.hpp"
#include "metaforge/llm/prompts.hpp"

namespace metaforge::index {

struct SemanticEntry {
  FieldRef field;
  std::vector<double> embedding;
  std::string long_summary;
};

/// Brute-force cosine index over long field summaries. Exact search is
/// plenty at benchmark-schema scale.
struct SemanticIndex {
  std::size_t dimension = 0;
  std::vector<SemanticEntry> entries;
};

/// One entry per (field, long summary); embeddings via the gateway.
SemanticIndex build_semantic_index(
    const std::vector<std::pair<FieldRef, std::string>>& summaries, llm::Gateway& gw);

/// Top-m fields by cosine similarity to the question embedding, ties by
/// field identifier. Dimension mismatches are configuration errors.
std::vector<FieldRef> semantic_search(const std::string& question, const SemanticIndex& index,
                                      llm::Gateway& gw, std::size_t top_m);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// --- masked-question few-shot index ---

struct MaskResult {
  std::string masked;
  std::map<std::string, std::string> placeholders;  // placeholder -> original span
};

/// Asks the model to replace names/literals with numbered bracketed
/// placeholders, then validates that all surrounding tokens survived in
/// order. One retry on validation failure, then Error(masking_failed).
MaskResult mask_question(const std::string& question, llm::Gateway& gw,
                         const llm::PromptSet& prompts);

struct FewShotEntry {
  std::string masked_question;
  std::vector<double> embedding;
  std::string question;
  std::string sql;
};

struct FewShotIndex {
  std::size_t dimension = 0;
  std::vector<FewShotEntry> entries;
};

FewShotIndex build_few_shot_index(
    const std::vector<std::pair<std::string, std::string>>& question_sql_pairs,
    llm::Gateway& gw, const llm::PromptSet& prompts);

/// Masks the input, embeds it, and returns the top-m (question, SQL) pairs
/// by cosine similarity. Entries whose original question equals the input
/// are excluded.
std::vector<std::pair<std::string, std::string>> find_few_shot(const std::string& question,
                                                               const FewShotIndex& index,
                                                               llm::Gateway& gw,
                                                               const llm::PromptSet& prompts,
                                                               std::size_t m);

std::string to_json(const SemanticIndex& index);
SemanticIndex semantic_index_from_json(const std::string& text);
std::string to_json(const FewShotIndex& index);
FewShotIndex few_shot_index_from_json(const std::string& text);

}  // namespace metaforge::index
