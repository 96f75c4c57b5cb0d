#include "metaforge/gen/pipeline.hpp"

#include <algorithm>

#include "metaforge/sql/resolve.hpp"
#include "metaforge/util/hash.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::gen {

std::string_view to_string(LintRule rule) {
  switch (rule) {
    case LintRule::null_order_asc: return "null_order_asc";
    case LintRule::null_min_aggregate: return "null_min_aggregate";
    case LintRule::minmax_via_subquery: return "minmax_via_subquery";
    case LintRule::string_catenation_output: return "string_catenation_output";
  }
  return "unknown";
}

ResultSet execute_sql(const db::Database& database, const std::string& sql,
                      std::int64_t timeout_ms) {
  ResultSet result;
  for (auto& row : database.query_all(sql, timeout_ms)) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (auto& cell : row) {
      cells.push_back(cell ? *cell : std::string(kNullToken));
    }
    result.as_set.insert(cells);
    result.rows.push_back(std::move(cells));
  }
  return result;
}

std::string build_prompt(const std::string& question, const std::optional<std::string>& hint,
                         const link::LinkResult& link,
                         const std::vector<std::pair<std::string, std::string>>& few_shot,
                         const summarize::DescriptorStore& descriptors,
                         const llm::PromptSet& prompts, std::uint64_t shuffle_seed,
                         const std::set<std::string>& fk_pairs) {
  std::vector<FieldRef> fields(link.fields.begin(), link.fields.end());
  hash::deterministic_shuffle(fields, shuffle_seed);
  std::string context =
      link::render_schema_context(fields, descriptors, summarize::MetadataKind::maximal,
                                  fk_pairs);
  std::string examples;
  if (!few_shot.empty()) {
    examples = "Here are similar questions with their SQL:\n";
    for (const auto& [q, s] : few_shot) {
      examples += "Question: " + q + "\nSQL: " + s + "\n";
    }
  }
  std::string hint_section;
  if (hint && !hint->empty()) hint_section = "Hint: " + *hint + "\n";
  return prompts.render("generate_sql", {{"context", context},
                                         {"examples", examples},
                                         {"question", question},
                                         {"hint_section", hint_section}});
}

Validation validate_sql(const std::string& sql_text, const sql::SchemaMap& schema) {
  Validation v;
  sql::QueryAst ast;
  try {
    ast = sql::parse_sql(sql_text);
  } catch (const Error& e) {
    v.diagnostics.push_back(e.what());
    return v;
  }
  try {
    sql::Resolution resolution(ast, schema);
    (void)resolution;
    v.parse_ok = true;
    v.ast = std::move(ast);
  } catch (const Error& e) {
    v.diagnostics.push_back(e.what());
  }
  return v;
}

NullabilityMap build_nullability(const db::Database& database,
                                 const profile::ProfileStore* profiles) {
  NullabilityMap map;
  for (const auto& table : database.table_names()) {
    for (const auto& col : database.columns(table)) {
      std::string key = strings::to_lower(table) + "." + strings::to_lower(col.name);
      const profile::FieldProfile* p =
          profiles ? profiles->field({table, col.name}) : nullptr;
      if (p) {
        map[key] = p->null_count > 0;
      } else {
        map[key] = !col.not_null;
      }
    }
  }
  return map;
}

namespace {

bool may_be_null(const NullabilityMap& nullability, const sql::Expr& resolved_column) {
  auto it = nullability.find(strings::to_lower(resolved_column.qualifier) + "." +
                             strings::to_lower(resolved_column.text));
  return it == nullability.end() ? true : it->second;
}

/// Collects columns guarded by "x IS NOT NULL" conjuncts in the WHERE clause.
void collect_not_null_guards(const sql::Expr& expr, std::set<std::string>& out,
                             const sql::Resolution::SelectContext& ctx) {
  if (expr.kind == sql::ExprKind::binary_op && expr.text == "AND") {
    collect_not_null_guards(expr.args[0], out, ctx);
    collect_not_null_guards(expr.args[1], out, ctx);
    return;
  }
  if (expr.kind == sql::ExprKind::is_null && expr.negated) {
    auto resolved = ctx.resolve(expr.args[0]);
    if (resolved.kind == sql::ExprKind::column) {
      out.insert(strings::to_lower(resolved.qualifier) + "." +
                 strings::to_lower(resolved.text));
    }
  }
}

int count_column_refs(const sql::Expr& expr) {
  if (expr.kind == sql::ExprKind::column) return 1;
  int n = 0;
  for (const auto& arg : expr.args) n += count_column_refs(arg);
  return n;
}

bool is_concat_of_columns(const sql::Expr& expr) {
  if (!(expr.kind == sql::ExprKind::binary_op && expr.text == "||")) return false;
  return count_column_refs(expr) >= 2;
}

/// True when `sub` is a scalar subquery computing min(f)/max(f) of exactly
/// the column `resolved_field`.
bool subquery_computes_minmax_of(const sql::Select& sub, const sql::Expr& resolved_field,
                                 const sql::SchemaMap& schema) {
  if (sub.items.size() != 1) return false;
  const auto& item = sub.items[0].expr;
  if (item.kind != sql::ExprKind::func_call || item.args.size() != 1) return false;
  if (item.text != "min" && item.text != "max") return false;
  try {
    sql::QueryAst sub_ast;
    sub_ast.root = std::make_shared<sql::Select>(sub);
    sql::Resolution resolution(sub_ast, schema);
    auto summary = resolution.top();
    if (summary.fields.size() != 1) return false;
    const auto& formula = summary.fields[0].formula;
    if (formula.kind != sql::ExprKind::func_call || formula.args.size() != 1) return false;
    const auto& inner = formula.args[0];
    return inner.kind == sql::ExprKind::column &&
           strings::iequals(inner.qualifier, resolved_field.qualifier) &&
           strings::iequals(inner.text, resolved_field.text);
  } catch (const Error&) {
    return false;
  }
}

void scan_minmax_subquery(const sql::Expr& expr, const std::string& path,
                          const sql::Resolution::SelectContext& ctx,
                          const sql::SchemaMap& schema, std::vector<LintFlag>& flags) {
  if (expr.kind == sql::ExprKind::binary_op && expr.text == "=") {
    for (int side = 0; side < 2; ++side) {
      const auto& field_side = expr.args[side];
      const auto& sub_side = expr.args[1 - side];
      if (field_side.kind == sql::ExprKind::column &&
          sub_side.kind == sql::ExprKind::subquery) {
        sql::Expr resolved;
        try {
          resolved = ctx.resolve(field_side);
        } catch (const Error&) {
          continue;
        }
        if (resolved.kind == sql::ExprKind::column &&
            subquery_computes_minmax_of(*sub_side.select, resolved, schema)) {
          flags.push_back({LintRule::minmax_via_subquery, path});
          return;
        }
      }
    }
  }
  for (std::size_t i = 0; i < expr.args.size(); ++i) {
    scan_minmax_subquery(expr.args[i], path + "/arg[" + std::to_string(i) + "]", ctx, schema,
                         flags);
  }
}

}  // namespace

std::vector<LintFlag> lint_sql(const sql::QueryAst& ast, const sql::SchemaMap& schema,
                               const NullabilityMap& nullability) {
  std::vector<LintFlag> flags;
  sql::Resolution resolution(ast, schema);

  resolution.visit_selects([&](const sql::Resolution::SelectContext& ctx) {
    if (!ctx.is_top()) return;  // output-shape rules concern the outer query
    const auto& select = ctx.select();

    std::set<std::string> guarded;
    if (select.where) collect_not_null_guards(*select.where, guarded, ctx);

    auto column_guarded = [&](const sql::Expr& resolved) {
      return guarded.count(strings::to_lower(resolved.qualifier) + "." +
                           strings::to_lower(resolved.text)) > 0;
    };

    // ORDER BY f ASC (or default) on a nullable f without a NOT NULL guard.
    for (std::size_t i = 0; i < select.order_by.size(); ++i) {
      const auto& item = select.order_by[i];
      if (item.has_direction && !item.ascending) continue;
      if (item.expr.kind != sql::ExprKind::column) continue;
      sql::Expr resolved;
      try {
        resolved = ctx.resolve(item.expr);
      } catch (const Error&) {
        continue;
      }
      if (resolved.kind != sql::ExprKind::column) continue;
      if (may_be_null(nullability, resolved) && !column_guarded(resolved)) {
        flags.push_back({LintRule::null_order_asc, "order_by[" + std::to_string(i) + "]"});
      }
    }

    for (std::size_t i = 0; i < select.items.size(); ++i) {
      const auto& expr = select.items[i].expr;
      std::string path = "select[" + std::to_string(i) + "]";

      // min(f) over a nullable f without a NOT NULL guard.
      if (expr.kind == sql::ExprKind::func_call && expr.text == "min" &&
          expr.args.size() == 1 && expr.args[0].kind == sql::ExprKind::column) {
        sql::Expr resolved;
        try {
          resolved = ctx.resolve(expr.args[0]);
        } catch (const Error&) {
          resolved = {};
        }
        if (resolved.kind == sql::ExprKind::column && may_be_null(nullability, resolved) &&
            !column_guarded(resolved)) {
          flags.push_back({LintRule::null_min_aggregate, path});
        }
      }

      // Select-list catenation of column references.
      if (is_concat_of_columns(expr)) {
        flags.push_back({LintRule::string_catenation_output, path});
      }
    }

    // Field equated to a scalar subquery computing its own min/max.
    if (select.where) {
      scan_minmax_subquery(*select.where, "where", ctx, schema, flags);
    }
  });

  return flags;
}

std::vector<SqlCandidate> generate_candidates(
    const std::string& question, const std::optional<std::string>& hint,
    const link::LinkResult& link,
    const std::vector<std::pair<std::string, std::string>>& few_shot,
    const summarize::DescriptorStore& descriptors, llm::Gateway& gw,
    const llm::PromptSet& prompts, const db::Database& database,
    const profile::ProfileStore* profiles, const GenerateConfig& config,
    const std::set<std::string>& fk_pairs) {
  if (config.candidates < 1) {
    throw Error(ErrorKind::config, "candidate count must be at least 1");
  }
  auto schema = database.schema_map();
  auto nullability = build_nullability(database, profiles);

  std::vector<SqlCandidate> candidates;
  int failures = 0;
  for (int i = 0; i < config.candidates; ++i) {
    SqlCandidate candidate;
    candidate.seed =
        static_cast<std::int64_t>(hash::splitmix64_at(static_cast<std::uint64_t>(config.seed), i));
    candidate.schema_order_permutation =
        hash::splitmix64_at(static_cast<std::uint64_t>(config.seed) ^ 0xfeedULL, i);

    auto prompt = build_prompt(question, hint, link, few_shot, descriptors, prompts,
                               candidate.schema_order_permutation, fk_pairs);
    llm::ChatRequest req;
    req.tag = "generate_sql";
    req.seed = candidate.seed;
    req.system_prompt = "You translate questions into a single SQLite SQL query.";
    req.user_prompt = prompt;

    try {
      candidate.sql = link::extract_sql_from_response(gw.chat(req));
    } catch (const Error&) {
      candidate.failed = true;
      ++failures;
      candidates.push_back(std::move(candidate));
      continue;
    }

    for (int round = 0; round <= config.correction_budget; ++round) {
      auto validation = validate_sql(candidate.sql, schema);
      candidate.parse_ok = validation.parse_ok;
      candidate.diagnostics = validation.diagnostics;
      candidate.lint_flags.clear();
      if (validation.parse_ok) {
        candidate.lint_flags = lint_sql(*validation.ast, schema, nullability);
      }
      if (candidate.parse_ok && candidate.lint_flags.empty()) break;
      if (round == config.correction_budget) break;

      std::string problems;
      if (!candidate.parse_ok) {
        problems = strings::join(candidate.diagnostics, "; ");
      } else {
        std::vector<std::string> names;
        for (const auto& flag : candidate.lint_flags) {
          names.push_back(std::string(to_string(flag.rule)) + " at " + flag.location);
        }
        problems = strings::join(names, "; ");
      }
      llm::ChatRequest correction;
      correction.tag = "correct_sql";
      correction.seed = candidate.seed;  // seed stays fixed through corrections
      correction.system_prompt = req.system_prompt;
      correction.user_prompt = prompts.render("correct_sql", {{"question", question},
                                                              {"sql", candidate.sql},
                                                              {"problems", problems}});
      try {
        candidate.sql = link::extract_sql_from_response(gw.chat(correction));
      } catch (const Error&) {
        candidate.failed = true;
        ++failures;
        break;
      }
      ++candidate.correction_rounds;
    }
    candidates.push_back(std::move(candidate));
  }
  if (failures == config.candidates) {
    throw Error(ErrorKind::generation_failed, "every candidate failed at the gateway");
  }
  return candidates;
}

std::size_t majority_vote_index(std::vector<SqlCandidate>& candidates,
                                const db::Database& database, std::int64_t seed,
                                std::int64_t timeout_ms) {
  if (candidates.empty()) {
    throw Error(ErrorKind::vote, "cannot vote over an empty candidate list");
  }
  std::vector<std::size_t> executed;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& candidate = candidates[i];
    if (!candidate.parse_ok || candidate.failed) continue;
    try {
      candidate.execution = execute_sql(database, candidate.sql, timeout_ms);
      executed.push_back(i);
    } catch (const Error&) {
      candidate.execution.reset();  // execution failures are excluded
    }
  }

  if (!executed.empty()) {
    // Group by result set (as sets: duplicates and order are irrelevant).
    std::vector<std::vector<std::size_t>> groups;
    for (auto i : executed) {
      bool placed = false;
      for (auto& group : groups) {
        if (candidates[group[0]].execution->set_equal(*candidates[i].execution)) {
          group.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back({i});
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < groups.size(); ++g) {
      if (groups[g].size() > groups[best].size() ||
          (groups[g].size() == groups[best].size() && groups[g][0] < groups[best][0])) {
        best = g;
      }
    }
    if (groups[best].size() >= 2) {
      return groups[best][0];
    }
    // No agreement: seeded random choice among executed candidates.
    std::uint64_t pick = hash::bounded(hash::splitmix64_at(static_cast<std::uint64_t>(seed), 1),
                                       executed.size());
    return executed[pick];
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].parse_ok && !candidates[i].failed) return i;
  }
  return 0;
}

SqlCandidate majority_vote(std::vector<SqlCandidate> candidates, const db::Database& database,
                           std::int64_t seed, std::int64_t timeout_ms) {
  auto index = majority_vote_index(candidates, database, seed, timeout_ms);
  return candidates[index];
}

}  // namespace metaforge::gen
