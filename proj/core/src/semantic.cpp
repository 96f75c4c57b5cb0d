#include "metaforge/index/semantic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "metaforge/util/strings.hpp"

namespace metaforge::index {

using ordered_json = nlohmann::ordered_json;

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::config, "embedding dimension mismatch: " + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SemanticIndex build_semantic_index(
    const std::vector<std::pair<FieldRef, std::string>>& summaries, llm::Gateway& gw) {
  SemanticIndex index;
  for (const auto& [field, summary] : summaries) {
    SemanticEntry entry;
    entry.field = field;
    entry.long_summary = summary;
    entry.embedding = gw.embed(summary, "embed_summary");
    if (index.entries.empty()) {
      index.dimension = entry.embedding.size();
    } else if (entry.embedding.size() != index.dimension) {
      throw Error(ErrorKind::config, "embedding dimension mismatch building semantic index");
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

std::vector<FieldRef> semantic_search(const std::string& question, const SemanticIndex& index,
                                      llm::Gateway& gw, std::size_t top_m) {
  if (index.entries.empty()) {
    throw Error(ErrorKind::config, "semantic index is empty");
  }
  auto query = gw.embed(question, "embed_question");
  std::vector<std::pair<double, FieldRef>> scored;
  scored.reserve(index.entries.size());
  for (const auto& entry : index.entries) {
    scored.emplace_back(cosine_similarity(query, entry.embedding), entry.field);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.key() < b.second.key();
  });
  if (scored.size() > top_m) scored.resize(top_m);
  std::vector<FieldRef> out;
  out.reserve(scored.size());
  for (auto& [score, field] : scored) out.push_back(std::move(field));
  return out;
}

namespace {

bool is_placeholder(const std::string& token) {
  if (token.size() < 3 || token.front() != '[' || token.back() != ']') return false;
  for (std::size_t i = 1; i + 1 < token.size(); ++i) {
    char c = token[i];
    if (!(std::isupper(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  return true;
}

// Strips sentence punctuation glued to a token so "in [ORG_1]." validates.
std::string strip_trailing_punct(const std::string& token) {
  std::string out = token;
  while (!out.empty() && (out.back() == '.' || out.back() == ',' || out.back() == '?' ||
                          out.back() == '!' || out.back() == ';'))
    out.pop_back();
  return out;
}

struct Alignment {
  bool ok = false;
  std::map<std::string, std::string> placeholders;
};

Alignment align_masked(const std::string& question, const std::string& masked) {
  auto original = strings::split_whitespace(question);
  auto tokens = strings::split_whitespace(masked);
  Alignment result;
  std::size_t oi = 0;
  for (std::size_t ti = 0; ti < tokens.size(); ++ti) {
    auto bare = strip_trailing_punct(tokens[ti]);
    if (is_placeholder(bare)) {
      // Find where the next literal token resumes in the original.
      std::size_t tj = ti + 1;
      while (tj < tokens.size() && is_placeholder(strip_trailing_punct(tokens[tj]))) ++tj;
      std::size_t resume = original.size();
      if (tj < tokens.size()) {
        auto needle = tokens[tj];
        for (std::size_t k = oi; k < original.size(); ++k) {
          if (original[k] == needle || strip_trailing_punct(original[k]) ==
                                           strip_trailing_punct(needle)) {
            resume = k;
            break;
          }
        }
        if (resume == original.size()) return result;  // literal token vanished
      }
      std::string span;
      for (std::size_t k = oi; k < resume; ++k) {
        if (!span.empty()) span += ' ';
        span += strip_trailing_punct(original[k]);
      }
      auto name = bare.substr(1, bare.size() - 2);
      result.placeholders[name] = span;
      oi = resume;
    } else {
      // Literal token: must appear at or after the cursor, in order.
      bool matched = false;
      while (oi < original.size()) {
        if (original[oi] == tokens[ti] ||
            strip_trailing_punct(original[oi]) == strip_trailing_punct(tokens[ti])) {
          matched = true;
          ++oi;
          break;
        }
        // Tokens may only be skipped when a placeholder consumed them, which
        // the placeholder branch already handled; any other skip is a drop.
        return result;
      }
      if (!matched) return result;
    }
  }
  result.ok = true;
  return result;
}

}  // namespace

MaskResult mask_question(const std::string& question, llm::Gateway& gw,
                         const llm::PromptSet& prompts) {
  if (question.empty()) throw Error(ErrorKind::config, "cannot mask an empty question");
  for (int attempt = 1; attempt <= 2; ++attempt) {
    llm::ChatRequest req;
    req.tag = "mask_question";
    req.system_prompt = "You rewrite questions, replacing named entities with placeholders.";
    req.user_prompt = prompts.render(
        "mask_question", {{"question", question}, {"attempt", std::to_string(attempt)}});
    auto response = strings::trim(gw.chat(req));
    auto alignment = align_masked(question, response);
    if (alignment.ok) {
      return {response, std::move(alignment.placeholders)};
    }
  }
  throw Error(ErrorKind::masking_failed,
              "masked text dropped or reordered question tokens: " + question);
}

FewShotIndex build_few_shot_index(
    const std::vector<std::pair<std::string, std::string>>& question_sql_pairs,
    llm::Gateway& gw, const llm::PromptSet& prompts) {
  FewShotIndex index;
  for (const auto& [question, sql] : question_sql_pairs) {
    FewShotEntry entry;
    entry.question = question;
    entry.sql = sql;
    try {
      entry.masked_question = mask_question(question, gw, prompts).masked;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::masking_failed) throw;
      entry.masked_question = question;  // index the raw question
    }
    entry.embedding = gw.embed(entry.masked_question, "embed_few_shot");
    if (index.entries.empty()) {
      index.dimension = entry.embedding.size();
    } else if (entry.embedding.size() != index.dimension) {
      throw Error(ErrorKind::config, "embedding dimension mismatch building few-shot index");
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

std::vector<std::pair<std::string, std::string>> find_few_shot(const std::string& question,
                                                               const FewShotIndex& index,
                                                               llm::Gateway& gw,
                                                               const llm::PromptSet& prompts,
                                                               std::size_t m) {
  if (index.entries.empty()) return {};
  std::string masked;
  try {
    masked = mask_question(question, gw, prompts).masked;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::masking_failed) throw;
    masked = question;
  }
  auto query = gw.embed(masked, "embed_few_shot");
  std::vector<std::pair<double, const FewShotEntry*>> scored;
  for (const auto& entry : index.entries) {
    if (entry.question == question) continue;  // evaluation honesty
    scored.emplace_back(cosine_similarity(query, entry.embedding), &entry);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->masked_question < b.second->masked_question;
  });
  if (scored.size() > m) scored.resize(m);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(scored.size());
  for (const auto& [score, entry] : scored) {
    out.emplace_back(entry->question, entry->sql);
  }
  return out;
}

std::string to_json(const SemanticIndex& index) {
  ordered_json j;
  j["dimension"] = index.dimension;
  ordered_json entries = ordered_json::array();
  for (const auto& e : index.entries) {
    ordered_json entry;
    entry["table"] = e.field.table;
    entry["field"] = e.field.field;
    entry["embedding"] = e.embedding;
    entry["long_summary"] = e.long_summary;
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  return j.dump() + "\n";
}

SemanticIndex semantic_index_from_json(const std::string& text) {
  auto j = ordered_json::parse(text);
  SemanticIndex index;
  index.dimension = j.at("dimension").get<std::size_t>();
  for (const auto& e : j.at("entries")) {
    SemanticEntry entry;
    entry.field = {e.at("table").get<std::string>(), e.at("field").get<std::string>()};
    entry.embedding = e.at("embedding").get<std::vector<double>>();
    entry.long_summary = e.at("long_summary").get<std::string>();
    if (entry.embedding.size() != index.dimension) {
      throw Error(ErrorKind::config, "semantic index entry dimension mismatch");
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

std::string to_json(const FewShotIndex& index) {
  ordered_json j;
  j["dimension"] = index.dimension;
  ordered_json entries = ordered_json::array();
  for (const auto& e : index.entries) {
    ordered_json entry;
    entry["masked_question"] = e.masked_question;
    entry["embedding"] = e.embedding;
    entry["question"] = e.question;
    entry["sql"] = e.sql;
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  return j.dump() + "\n";
}

FewShotIndex few_shot_index_from_json(const std::string& text) {
  auto j = ordered_json::parse(text);
  FewShotIndex index;
  index.dimension = j.at("dimension").get<std::size_t>();
  for (const auto& e : j.at("entries")) {
    FewShotEntry entry;
    entry.masked_question = e.at("masked_question").get<std::string>();
    entry.embedding = e.at("embedding").get<std::vector<double>>();
    entry.question = e.at("question").get<std::string>();
    entry.sql = e.at("sql").get<std::string>();
    if (entry.embedding.size() != index.dimension) {
      throw Error(ErrorKind::config, "few-shot index entry dimension mismatch");
    }
    index.entries.push_back(std::move(entry));
  }
  return index;
}

}  // namespace metaforge::index
