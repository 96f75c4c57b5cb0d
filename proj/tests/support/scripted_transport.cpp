#include "scripted_transport.hpp"

#include <cmath>

#include "metaforge/index/shingle.hpp"
#include "metaforge/util/hash.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::testing {

namespace {

/// Text following `marker` up to end of line, from the last occurrence.
std::string after_last(const std::string& text, const std::string& marker) {
  auto pos = text.rfind(marker);
  if (pos == std::string::npos) return "";
  auto start = pos + marker.size();
  auto end = text.find('\n', start);
  return strings::trim(text.substr(start, end == std::string::npos ? std::string::npos
                                                                   : end - start));
}

std::string between(const std::string& text, const std::string& from, const std::string& to) {
  auto a = text.find(from);
  if (a == std::string::npos) return "";
  a += from.size();
  auto b = text.find(to, a);
  if (b == std::string::npos) return "";
  return strings::trim(text.substr(a, b - a));
}

}  // namespace

std::vector<double> trigram_embedding(const std::string& text, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& s : index::shingles(text, 3)) {
    auto h = hash::fnv1a64(s);
    double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
    v[h % dim] += sign;
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& x : v) x /= norm;
  } else {
    v[0] = 1.0;
  }
  return v;
}

std::string ScriptedTransport::complete(const llm::ChatRequest& req) {
  ++calls;
  const std::string& prompt = req.user_prompt;
  if (req.tag == "summarize_field") {
    auto table = after_last(prompt, "Table: ");
    auto field = after_last(prompt, "Column: ");
    auto key = strings::to_lower(table) + "." + strings::to_lower(field);
    auto it = summaries.find(key);
    if (it != summaries.end()) return it->second;
    auto sample = between(prompt, "Most common non-NULL column values are '", "'");
    if (sample.empty()) {
      return "The " + field + " column in table " + table + " is empty.";
    }
    return "The " + field + " column in table " + table + " stores values such as '" + sample +
           "'.";
  }
  if (req.tag == "mask_question") {
    auto question = after_last(prompt, "Question: ");
    auto it = masks.find(question);
    if (it != masks.end()) return it->second;
    auto literals = strings::extract_literals(question);
    std::string masked = question;
    int counter = 0;
    for (const auto& literal : literals) {
      auto pos = masked.find(literal);
      if (pos == std::string::npos) continue;
      masked.replace(pos, literal.size(), "[ENT_" + std::to_string(++counter) + "]");
    }
    return masked;
  }
  if (req.tag == "link_generate") {
    auto question = after_last(prompt, "Question: ");
    auto it = link_sql.find(question);
    if (it != link_sql.end()) return it->second;
    auto gen = generated_sql.find(question);
    if (gen != generated_sql.end()) return gen->second;
    return "SELECT 1";
  }
  if (req.tag == "link_revise") {
    auto question = after_last(prompt, "Question: ");
    auto it = revise_sql.find(question);
    if (it != revise_sql.end()) return it->second;
    return between(prompt, "A previous attempt was:\n", "\n\nThe literal");
  }
  if (req.tag == "generate_sql") {
    auto question = after_last(prompt, "Question: ");
    auto it = generated_sql.find(question);
    if (it != generated_sql.end()) return it->second;
    auto linked = link_sql.find(question);
    if (linked != link_sql.end()) {
      auto revised = revise_sql.find(question);
      return revised != revise_sql.end() ? revised->second : linked->second;
    }
    return "SELECT 1";
  }
  if (req.tag == "correct_sql") {
    auto question = after_last(prompt, "Question: ");
    auto it = corrected_sql.find(question);
    if (it != corrected_sql.end()) return it->second;
    return after_last(prompt, "SQL: ");
  }
  if (req.tag == "sql2text") {
    auto sql_text = between(prompt, "SQL query:\n", "\n\nWrite two");
    auto it = question_pairs.find(sql_text);
    if (it != question_pairs.end()) return it->second;
    return "Q1:: Which rows satisfy the conditions stated in the query?\n"
           "Q2:: What matches the query?";
  }
  return "SELECT 1";
}

std::vector<double> ScriptedTransport::embed(const std::string& text) {
  ++calls;
  return trigram_embedding(text, embedding_dim);
}

std::string FailingTransport::complete(const llm::ChatRequest&) {
  if (++attempts <= failures_before_success) {
    throw Error(ErrorKind::transport, "scripted transport failure");
  }
  return response;
}

std::vector<double> FailingTransport::embed(const std::string&) {
  if (++attempts <= failures_before_success) {
    throw Error(ErrorKind::transport, "scripted transport failure");
  }
  return {0.1, 0.2};
}

}  // namespace metaforge::testing
