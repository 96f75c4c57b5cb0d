#include "metaforge/sql2text/sql2text.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "metaforge/link/linker.hpp"
#include "metaforge/sql/parse.hpp"
#include "metaforge/sql/resolve.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::sql2text {

using ordered_json = nlohmann::ordered_json;

RatingLevel rating_from_string(std::string_view name) {
  if (name == "bad") return RatingLevel::bad;
  if (name == "bad+") return RatingLevel::bad_plus;
  if (name == "good-") return RatingLevel::good_minus;
  if (name == "good") return RatingLevel::good;
  if (name == "good+") return RatingLevel::good_plus;
  throw Error(ErrorKind::config, "unknown rating level: " + std::string(name));
}

std::string_view to_string(RatingLevel level) {
  switch (level) {
    case RatingLevel::bad: return "bad";
    case RatingLevel::bad_plus: return "bad+";
    case RatingLevel::good_minus: return "good-";
    case RatingLevel::good: return "good";
    case RatingLevel::good_plus: return "good+";
  }
  return "bad";
}

std::optional<std::pair<std::string, std::string>> parse_question_pair(
    const std::string& response) {
  auto find_marker = [&](std::initializer_list<const char*> names, std::size_t from)
      -> std::pair<std::size_t, std::size_t> {  // position, marker length
    for (const char* name : names) {
      auto pos = response.find(name, from);
      if (pos != std::string::npos) return {pos, std::string(name).size()};
    }
    return {std::string::npos, 0};
  };
  auto [first_pos, first_len] = find_marker({"Q1::", "Step 1:", "Step 1."}, 0);
  if (first_pos == std::string::npos) return std::nullopt;
  auto [second_pos, second_len] =
      find_marker({"Q2::", "Step 2:", "Step 2."}, first_pos + first_len);
  if (second_pos == std::string::npos) return std::nullopt;
  std::string long_q =
      strings::normalize_whitespace(response.substr(first_pos + first_len,
                                                    second_pos - first_pos - first_len));
  std::string short_q = strings::normalize_whitespace(response.substr(second_pos + second_len));
  if (long_q.empty() || short_q.empty()) return std::nullopt;
  return std::make_pair(long_q, short_q);
}

GeneratedQuestions generate_questions(const std::string& sql_text,
                                      const sql::SchemaMap& schema,
                                      const summarize::DescriptorStore& descriptors,
                                      llm::Gateway& gw, const llm::PromptSet& prompts,
                                      summarize::MetadataKind metadata_variant) {
  auto ast = sql::parse_sql(sql_text);
  sql::Resolution resolution(ast, schema);

  GeneratedQuestions out;
  out.sql = sql_text;
  out.focused_fields = resolution.fields_referenced();

  std::vector<FieldRef> fields(out.focused_fields.begin(), out.focused_fields.end());
  std::string context =
      link::render_schema_context(fields, descriptors, metadata_variant, {});

  for (int attempt = 1; attempt <= 2; ++attempt) {
    llm::ChatRequest req;
    req.tag = "sql2text";
    req.system_prompt =
        "You write natural-language questions that an SQL query answers.";
    req.user_prompt = prompts.render("sql2text", {{"sql", sql_text},
                                                  {"context", context},
                                                  {"attempt", std::to_string(attempt)}});
    auto response = gw.chat(req);
    if (auto pair = parse_question_pair(response)) {
      out.long_question = pair->first;
      out.short_question = pair->second;
      return out;
    }
  }
  throw Error(ErrorKind::generation_failed,
              "model reply did not contain the two delimited questions");
}

bool FeaturePredicate::matches(const sql::QueryFeatures& features) const {
  auto match_text = [&](const std::string& text) {
    if (substring) return text.find(pattern) != std::string::npos;
    return text == pattern;
  };
  switch (kind) {
    case Kind::table:
      for (const auto& t : features.tables_referenced) {
        if (match_text(strings::to_lower(t))) return true;
      }
      return false;
    case Kind::field:
      for (const auto& f : features.fields_referenced) {
        if (match_text(f.key())) return true;
      }
      return false;
    case Kind::join:
      for (const auto& c : features.join_constraints) {
        if (match_text(c.normalized())) return true;
      }
      return false;
    case Kind::constraint:
      for (const auto& c : features.non_join_constraints) {
        if (match_text(c.normalized())) return true;
      }
      for (const auto& c : features.join_constraints) {
        if (match_text(c.normalized())) return true;
      }
      return false;
    case Kind::named_field:
      for (const auto& [name, formula] : features.named_select_fields) {
        if (match_text(strings::to_lower(name))) return true;
      }
      return false;
    case Kind::group_by:
      for (const auto& g : features.group_by_formulas) {
        if (match_text(strings::to_lower(sql::render_formula(g)))) return true;
      }
      return false;
  }
  return false;
}

namespace {

FeaturePredicate::Kind predicate_kind_from_string(std::string_view name) {
  if (name == "table") return FeaturePredicate::Kind::table;
  if (name == "field") return FeaturePredicate::Kind::field;
  if (name == "join") return FeaturePredicate::Kind::join;
  if (name == "constraint") return FeaturePredicate::Kind::constraint;
  if (name == "named_field") return FeaturePredicate::Kind::named_field;
  if (name == "group_by") return FeaturePredicate::Kind::group_by;
  throw Error(ErrorKind::config, "unknown feature predicate kind: " + std::string(name));
}

}  // namespace

FeatureSelector selector_from_json(const std::string& text) {
  auto j = ordered_json::parse(text);
  FeatureSelector selector;
  for (const auto& group : j.at("feature_sets")) {
    std::vector<FeaturePredicate> predicates;
    for (const auto& p : group) {
      FeaturePredicate predicate;
      predicate.kind = predicate_kind_from_string(p.at("kind").get<std::string>());
      predicate.pattern = strings::to_lower(p.at("pattern").get<std::string>());
      if (p.contains("substring")) predicate.substring = p.at("substring").get<bool>();
      predicates.push_back(std::move(predicate));
    }
    selector.groups.push_back(std::move(predicates));
  }
  return selector;
}

std::vector<std::string> select_queries_by_features(
    const std::vector<std::pair<std::string, sql::QueryFeatures>>& log,
    const FeatureSelector& selector) {
  std::set<std::string> selected;
  for (const auto& [id, features] : log) {
    for (const auto& group : selector.groups) {
      bool all = !group.empty();
      for (const auto& predicate : group) {
        if (!predicate.matches(features)) {
          all = false;
          break;
        }
      }
      if (all) {
        selected.insert(id);
        break;
      }
    }
  }
  return {selected.begin(), selected.end()};
}

void grade_pair(const std::filesystem::path& store, const GeneratedQuestions& generated,
                const std::string& reference_question, const QuestionRating& rating,
                const std::string& variant) {
  ordered_json j;
  j["sql"] = generated.sql;
  j["long_question"] = generated.long_question;
  j["short_question"] = generated.short_question;
  j["reference_question"] = reference_question;
  j["rating"] = std::string(to_string(rating.level));
  if (rating.note) j["note"] = *rating.note;
  j["variant"] = variant;
  io::append_line(store, j.dump());
}

std::vector<EvaluationRow> load_evaluation_rows(const std::filesystem::path& store) {
  std::vector<EvaluationRow> rows;
  for (const auto& line : io::read_lines(store)) {
    if (strings::trim(line).empty()) continue;
    auto j = ordered_json::parse(line);
    EvaluationRow row;
    row.sql = j.value("sql", "");
    row.long_question = j.value("long_question", "");
    row.short_question = j.value("short_question", "");
    row.reference_question = j.value("reference_question", "");
    row.rating.level = rating_from_string(j.at("rating").get<std::string>());
    if (j.contains("note")) row.rating.note = j.at("note").get<std::string>();
    row.variant = j.at("variant").get<std::string>();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<RatingLevel, std::size_t> tally(const std::vector<EvaluationRow>& rows,
                                         const std::string& variant) {
  std::map<RatingLevel, std::size_t> counts = {
      {RatingLevel::bad, 0},
      {RatingLevel::bad_plus, 0},
      {RatingLevel::good_minus, 0},
      {RatingLevel::good, 0},
      {RatingLevel::good_plus, 0},
  };
  for (const auto& row : rows) {
    if (row.variant == variant) ++counts[row.rating.level];
  }
  return counts;
}

}  // namespace metaforge::sql2text
