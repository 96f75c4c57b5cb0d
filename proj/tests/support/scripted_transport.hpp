#pragma once

#include <map>
#include <string>
#include <vector>

#include "metaforge/llm/gateway.hpp"

namespace metaforge::testing {

/// Deterministic stand-in for a model service. Chat replies are dispatched
/// on the request tag and keyed by the question (or SQL) parsed out of the
/// prompt; embeddings are L2-normalized character-trigram feature hashes,
/// so textual similarity behaves plausibly. Pure function of its inputs:
/// recording against it yields reproducible cassettes.
class ScriptedTransport : public llm::ChatTransport {
 public:
  std::map<std::string, std::string> link_sql;       // question -> first SQL
  std::map<std::string, std::string> revise_sql;     // question -> revised SQL
  std::map<std::string, std::string> generated_sql;  // question -> SQL
  std::map<std::string, std::string> corrected_sql;  // question -> corrected SQL
  std::map<std::string, std::string> summaries;      // "table.field" (lower) -> short summary
  std::map<std::string, std::string> question_pairs; // sql -> "Q1:: ...\nQ2:: ..."
  std::map<std::string, std::string> masks;          // question -> masked text
  std::size_t embedding_dim = 64;
  int calls = 0;

  std::string complete(const llm::ChatRequest& req) override;
  std::vector<double> embed(const std::string& text) override;
};

/// The trigram embedding the scripted transport uses, exposed for tests
/// that need to predict similarity orderings.
std::vector<double> trigram_embedding(const std::string& text, std::size_t dim = 64);

/// A transport that always fails, for retry/backoff tests.
class FailingTransport : public llm::ChatTransport {
 public:
  int failures_before_success = 1000000;
  int attempts = 0;
  std::string response = "ok";

  std::string complete(const llm::ChatRequest&) override;
  std::vector<double> embed(const std::string&) override;
};

}  // namespace metaforge::testing
