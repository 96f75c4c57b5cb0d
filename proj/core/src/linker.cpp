#include "metaforge/link/linker.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "metaforge/sql/parse.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::link {

using ordered_json = nlohmann::ordered_json;

std::string SchemaVariant::label() const {
  std::string scope_name = scope == SchemaScope::focused ? "focused" : "full";
  return scope_name + "_" + std::string(summarize::to_string(metadata));
}

const std::array<SchemaVariant, 5>& all_variants() {
  static const std::array<SchemaVariant, 5> kVariants = {{
      {SchemaScope::focused, summarize::MetadataKind::minimal},
      {SchemaScope::focused, summarize::MetadataKind::maximal},
      {SchemaScope::full, summarize::MetadataKind::minimal},
      {SchemaScope::full, summarize::MetadataKind::maximal},
      {SchemaScope::focused, summarize::MetadataKind::full},
  }};
  return kVariants;
}

FocusedSchema compute_focused_schema(const std::string& question,
                                     const index::SemanticIndex& semantic,
                                     const std::vector<index::ValueIndex>& value_indexes,
                                     llm::Gateway& gw, std::size_t top_m,
                                     double min_similarity) {
  FocusedSchema focused;
  std::set<std::string> seen;
  for (auto& field : index::semantic_search(question, semantic, gw, top_m)) {
    if (seen.insert(field.key()).second) focused.fields.push_back(std::move(field));
  }
  for (const auto& literal : strings::extract_literals(question)) {
    for (auto& field : index::lookup_literal_fields(literal, value_indexes, min_similarity)) {
      if (seen.insert(field.key()).second) focused.fields.push_back(std::move(field));
    }
  }
  return focused;
}

std::string render_schema_context(const std::vector<FieldRef>& fields,
                                  const summarize::DescriptorStore& descriptors,
                                  summarize::MetadataKind kind,
                                  const std::set<std::string>& fk_pairs,
                                  const profile::ProfileStore* profiles) {
  std::string out;
  for (const auto& field : fields) {
    const auto* d = descriptors.find(field);
    std::string text;
    if (d) {
      switch (kind) {
        case summarize::MetadataKind::none:
          break;
        case summarize::MetadataKind::sme_only:
          if (d->sme_metadata) text = *d->sme_metadata;
          break;
        case summarize::MetadataKind::minimal:
          if (d->short_summary) text = *d->short_summary;
          break;
        case summarize::MetadataKind::maximal:
          if (d->long_summary) text = *d->long_summary;
          break;
        case summarize::MetadataKind::full:
          if (d->sme_metadata) text = *d->sme_metadata;
          if (d->long_summary) {
            if (!text.empty()) text += " ";
            text += *d->long_summary;
          }
          break;
      }
    }
    if (text.empty() && kind != summarize::MetadataKind::none && profiles) {
      if (const auto* p = profiles->field(field)) {
        text = profile::render_profile_english(*p);
      }
    }
    std::string line = "Field " + field.qualified();
    if (text.empty()) {
      line += ".";
    } else {
      line += " means: " + text;
    }
    // Documented joins for this field.
    std::string key = strings::to_lower(field.table) + "." + strings::to_lower(field.field);
    std::vector<std::string> partners;
    for (const auto& pair : fk_pairs) {
      auto eq = pair.find('=');
      if (eq == std::string::npos) continue;
      std::string a = pair.substr(0, eq), b = pair.substr(eq + 1);
      if (a == key) partners.push_back(b);
      if (b == key) partners.push_back(a);
    }
    std::sort(partners.begin(), partners.end());
    for (const auto& partner : partners) {
      line += " This field joins with " + partner + ".";
    }
    out += line + "\n";
  }
  return out;
}

std::string extract_sql_from_response(const std::string& response) {
  std::string text = strings::trim(response);
  auto fence = text.find("```");
  if (fence != std::string::npos) {
    auto start = text.find('\n', fence);
    auto end = text.find("```", fence + 3);
    if (start != std::string::npos && end != std::string::npos && start < end) {
      text = strings::trim(text.substr(start + 1, end - start - 1));
    }
  }
  while (!text.empty() && text.back() == ';') {
    text.pop_back();
    text = strings::trim(text);
  }
  return text;
}

namespace {

struct ParsedQuery {
  std::set<FieldRef> fields;
  std::set<std::string> literals;  // normalized string literals
  std::vector<std::string> notes;
  bool ok = false;
};

void collect_string_literals(const sql::Expr& expr, std::set<std::string>& out) {
  if (expr.kind == sql::ExprKind::string_lit) {
    auto normalized = strings::normalize_for_match(expr.text);
    if (!normalized.empty()) out.insert(normalized);
  }
  for (const auto& arg : expr.args) collect_string_literals(arg, out);
  if (expr.select) {
    for (const auto& item : expr.select->items) collect_string_literals(item.expr, out);
    if (expr.select->where) collect_string_literals(*expr.select->where, out);
  }
}

void collect_literals_from_select(const sql::Select& select, std::set<std::string>& out) {
  for (const auto& item : select.items) collect_string_literals(item.expr, out);
  for (const auto& ref : select.from) {
    if (ref.on) collect_string_literals(*ref.on, out);
    if (ref.subquery) collect_literals_from_select(*ref.subquery, out);
  }
  for (const auto& cte : select.ctes) collect_literals_from_select(*cte.query, out);
  if (select.where) collect_string_literals(*select.where, out);
  for (const auto& g : select.group_by) collect_string_literals(g, out);
  if (select.having) collect_string_literals(*select.having, out);
  for (const auto& o : select.order_by) collect_string_literals(o.expr, out);
}

bool schema_has(const sql::SchemaMap& schema, const FieldRef& ref, FieldRef* declared) {
  for (const auto& [table, cols] : schema) {
    if (!strings::iequals(table, ref.table)) continue;
    for (const auto& col : cols) {
      if (strings::iequals(col, ref.field)) {
        if (declared) *declared = {table, col};
        return true;
      }
    }
  }
  return false;
}

/// Syntactic fallback when exact resolution fails (hallucinated columns,
/// unsupported shapes): maps qualifiers through the FROM aliases and keeps
/// whatever checks out against the live schema.
void loose_collect(const sql::Select& select,
                   std::map<std::string, std::string> aliases,  // binding -> base table
                   const sql::SchemaMap& schema, ParsedQuery& result) {
  for (const auto& ref : select.from) {
    if (ref.is_subquery) {
      loose_collect(*ref.subquery, aliases, schema, result);
    } else {
      aliases[strings::to_lower(ref.binding_name())] = ref.table;
    }
  }
  auto visit_expr = [&](const sql::Expr& expr, auto&& self) -> void {
    if (expr.kind == sql::ExprKind::column) {
      FieldRef candidate;
      if (!expr.qualifier.empty()) {
        auto it = aliases.find(strings::to_lower(expr.qualifier));
        candidate = {it != aliases.end() ? it->second : expr.qualifier, expr.text};
      } else {
        for (const auto& [binding, table] : aliases) {
          if (schema_has(schema, {table, expr.text}, nullptr)) {
            candidate = {table, expr.text};
            break;
          }
        }
        if (candidate.table.empty()) candidate = {"", expr.text};
      }
      FieldRef declared;
      if (!candidate.table.empty() && schema_has(schema, candidate, &declared)) {
        result.fields.insert(declared);
      } else {
        result.notes.push_back("dropped hallucinated column " +
                               (expr.qualifier.empty() ? expr.text
                                                       : expr.qualifier + "." + expr.text));
      }
      return;
    }
    for (const auto& arg : expr.args) self(arg, self);
    if (expr.select) loose_collect(*expr.select, aliases, schema, result);
  };
  for (const auto& cte : select.ctes) loose_collect(*cte.query, aliases, schema, result);
  for (const auto& item : select.items) visit_expr(item.expr, visit_expr);
  for (const auto& ref : select.from) {
    if (ref.on) visit_expr(*ref.on, visit_expr);
  }
  if (select.where) visit_expr(*select.where, visit_expr);
  for (const auto& g : select.group_by) visit_expr(g, visit_expr);
  if (select.having) visit_expr(*select.having, visit_expr);
  for (const auto& o : select.order_by) visit_expr(o.expr, visit_expr);
}

/// Parses generated SQL and harvests base fields + literals. Aliased and
/// subquery references map to base columns via exact resolution; when the
/// model hallucinated columns, a tolerant syntactic pass keeps the fields
/// that do exist and drops the rest with a note.
ParsedQuery harvest(const std::string& sql_text, const sql::SchemaMap& schema) {
  ParsedQuery result;
  sql::QueryAst ast;
  try {
    ast = sql::parse_sql(sql_text);
  } catch (const Error& e) {
    result.notes.push_back(e.what());
    return result;
  }
  try {
    sql::Resolution resolution(ast, schema);
    for (const auto& ref : resolution.fields_referenced()) {
      FieldRef declared;
      if (schema_has(schema, ref, &declared)) {
        result.fields.insert(declared);
      } else {
        result.notes.push_back("dropped hallucinated column " + ref.qualified());
      }
    }
  } catch (const Error& e) {
    result.notes.push_back(std::string(e.what()) + " (using tolerant field harvest)");
    loose_collect(*ast.root, {}, schema, result);
  }
  collect_literals_from_select(*ast.root, result.literals);
  result.ok = true;
  return result;
}

}  // namespace

LinkResult link_schema(const LinkRequest& req, const LinkStores& stores, llm::Gateway& gw,
                       const llm::PromptSet& prompts) {
  if (!stores.descriptors || !stores.value_indexes || !stores.semantic) {
    throw Error(ErrorKind::config, "link_schema requires descriptor and index stores");
  }
  LinkResult result;
  int parsed_variants = 0;

  std::vector<FieldRef> full_fields;
  for (const auto& [table, cols] : stores.schema) {
    for (const auto& col : cols) full_fields.push_back({table, col});
  }

  for (const auto& variant : all_variants()) {
    VariantOutcome outcome;
    outcome.variant = variant.label();

    std::vector<FieldRef> context_fields;
    if (variant.scope == SchemaScope::focused) {
      context_fields = compute_focused_schema(req.question, *stores.semantic,
                                              *stores.value_indexes, gw, stores.focused_top_m,
                                              stores.literal_min_similarity)
                           .fields;
    } else {
      context_fields = full_fields;
    }

    std::string hint_section;
    if (req.oracle_hint && !req.oracle_hint->empty()) {
      hint_section = "Hint: " + *req.oracle_hint + "\n";
    }

    auto make_generate_prompt = [&](const std::vector<FieldRef>& fields) {
      return prompts.render(
          "link_generate",
          {{"context",
            render_schema_context(fields, *stores.descriptors, variant.metadata,
                                  stores.fk_pairs, stores.profiles)},
           {"question", req.question},
           {"hint_section", hint_section}});
    };

    llm::ChatRequest chat;
    chat.tag = "link_generate";
    chat.seed = req.seed;
    chat.system_prompt = "You translate questions into a single SQLite SQL query.";
    chat.user_prompt = make_generate_prompt(context_fields);

    std::string sql_text = extract_sql_from_response(gw.chat(chat));
    ParsedQuery parsed = harvest(sql_text, stores.schema);
    int retries = 0;

    // One re-prompt per remaining retry budget for unparseable SQL.
    while (!parsed.ok && retries < req.max_retry) {
      ++retries;
      llm::ChatRequest retry = chat;
      retry.tag = "link_generate";
      retry.user_prompt =
          chat.user_prompt + "\nThe previous answer was not valid SQL (" +
          (parsed.notes.empty() ? "unparseable" : parsed.notes.back()) +
          "). Answer again with one valid SQLite query.";
      sql_text = extract_sql_from_response(gw.chat(retry));
      parsed = harvest(sql_text, stores.schema);
    }

    if (parsed.ok) {
      // Literal repair loop.
      while (retries < req.max_retry) {
        std::vector<FieldRef> lit_fields;
        std::vector<std::string> missing_lits;
        std::set<std::string> lit_field_keys;
        for (const auto& literal : parsed.literals) {
          auto holders = index::lookup_literal_fields(literal, *stores.value_indexes,
                                                      stores.literal_min_similarity);
          bool covered = false;
          for (const auto& holder : holders) {
            for (const auto& used : parsed.fields) {
              if (strings::iequals(holder.table, used.table) &&
                  strings::iequals(holder.field, used.field)) {
                covered = true;
                break;
              }
            }
            if (covered) break;
          }
          if (!covered && !holders.empty()) {
            missing_lits.push_back(literal);
            for (auto& holder : holders) {
              if (lit_field_keys.insert(holder.key()).second) {
                lit_fields.push_back(std::move(holder));
              }
            }
          } else if (!covered) {
            outcome.unresolved_literals.push_back(literal);
          }
        }
        if (lit_fields.empty()) break;

        ++retries;
        std::vector<FieldRef> augmented = context_fields;
        std::set<std::string> have;
        for (const auto& f : augmented) have.insert(f.key());
        for (const auto& f : lit_fields) {
          if (have.insert(f.key()).second) augmented.push_back(f);
        }
        context_fields = augmented;

        std::vector<std::string> suggestions;
        for (const auto& f : lit_fields) suggestions.push_back(f.qualified());
        llm::ChatRequest revise;
        revise.tag = "link_revise";
        revise.seed = req.seed;
        revise.system_prompt = chat.system_prompt;
        revise.user_prompt = prompts.render(
            "link_revise",
            {{"context",
              render_schema_context(augmented, *stores.descriptors, variant.metadata,
                                    stores.fk_pairs, stores.profiles)},
             {"question", req.question},
             {"hint_section", hint_section},
             {"previous_sql", sql_text},
             {"missing_literals", strings::join(missing_lits, ", ")},
             {"suggested_fields", strings::join(suggestions, ", ")}});
        sql_text = extract_sql_from_response(gw.chat(revise));
        ParsedQuery revised = harvest(sql_text, stores.schema);
        if (!revised.ok) {
          parsed.notes.insert(parsed.notes.end(), revised.notes.begin(), revised.notes.end());
          break;
        }
        parsed = std::move(revised);
        outcome.unresolved_literals.clear();
      }

      // Record any still-unresolved literals when the budget ran out.
      if (retries >= req.max_retry) {
        for (const auto& literal : parsed.literals) {
          auto holders = index::lookup_literal_fields(literal, *stores.value_indexes,
                                                      stores.literal_min_similarity);
          bool covered = holders.empty();
          for (const auto& holder : holders) {
            for (const auto& used : parsed.fields) {
              if (strings::iequals(holder.table, used.table) &&
                  strings::iequals(holder.field, used.field)) {
                covered = true;
                break;
              }
            }
            if (covered) break;
          }
          if (!covered &&
              std::find(outcome.unresolved_literals.begin(), outcome.unresolved_literals.end(),
                        literal) == outcome.unresolved_literals.end()) {
            outcome.unresolved_literals.push_back(literal);
          }
        }
      }

      outcome.parsed = true;
      outcome.final_sql = sql_text;
      outcome.fields = parsed.fields;
      outcome.literals = parsed.literals;
      ++parsed_variants;
      result.fields.insert(parsed.fields.begin(), parsed.fields.end());
      result.literals.insert(parsed.literals.begin(), parsed.literals.end());
    } else {
      outcome.final_sql = sql_text;
    }
    outcome.retries_used = retries;
    outcome.notes = parsed.notes;
    result.per_variant[outcome.variant] = std::move(outcome);
  }

  if (parsed_variants == 0) {
    std::string diag;
    for (const auto& [label, outcome] : result.per_variant) {
      diag += label + ": " + (outcome.notes.empty() ? "no SQL" : outcome.notes.back()) + "; ";
    }
    throw Error(ErrorKind::linking_failed, "all variants failed to parse: " + diag);
  }
  return result;
}

std::string to_json(const LinkResult& result) {
  ordered_json j;
  ordered_json fields = ordered_json::array();
  for (const auto& f : result.fields) fields.push_back(f.qualified());
  j["fields"] = std::move(fields);
  j["literals"] = result.literals;
  ordered_json variants;
  for (const auto& [label, outcome] : result.per_variant) {
    ordered_json v;
    v["final_sql"] = outcome.final_sql;
    ordered_json vf = ordered_json::array();
    for (const auto& f : outcome.fields) vf.push_back(f.qualified());
    v["fields"] = std::move(vf);
    v["literals"] = outcome.literals;
    v["retries_used"] = outcome.retries_used;
    v["unresolved_literals"] = outcome.unresolved_literals;
    v["parsed"] = outcome.parsed;
    v["notes"] = outcome.notes;
    variants[label] = std::move(v);
  }
  j["per_variant"] = std::move(variants);
  return j.dump(2) + "\n";
}

}  // namespace metaforge::link
