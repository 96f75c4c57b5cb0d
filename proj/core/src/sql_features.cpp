#include "metaforge/sql/features.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "metaforge/util/strings.hpp"

namespace metaforge::sql {

using ordered_json = nlohmann::ordered_json;

bool ResolvedConstraint::both_plain_columns() const {
  return lhs.kind == ExprKind::column && rhs && rhs->kind == ExprKind::column;
}

std::string ResolvedConstraint::normalized() const {
  std::string left = strings::to_lower(render_formula(lhs));
  std::string lowered_op = strings::to_lower(op);
  if (!rhs) return left + " " + lowered_op;
  std::string right = strings::to_lower(render_formula(*rhs));
  if (is_equality() && right < left) std::swap(left, right);
  bool word_op = std::isalpha(static_cast<unsigned char>(lowered_op[0]));
  std::string sep = word_op ? " " : "";
  return left + sep + lowered_op + sep + right;
}

std::set<std::string> QueryFeatures::equality_join_pairs(const std::string& db_prefix) const {
  std::set<std::string> pairs;
  for (const auto& c : join_constraints) {
    if (!c.is_equality() || !c.both_plain_columns()) continue;
    std::string a = strings::to_lower(c.lhs.qualifier) + "." + strings::to_lower(c.lhs.text);
    std::string b = strings::to_lower(c.rhs->qualifier) + "." + strings::to_lower(c.rhs->text);
    if (!db_prefix.empty()) {
      a = strings::to_lower(db_prefix) + "." + a;
      b = strings::to_lower(db_prefix) + "." + b;
    }
    if (b < a) std::swap(a, b);
    pairs.insert(a + "=" + b);
  }
  return pairs;
}

namespace {

/// Splits a boolean expression into AND-conjuncts.
void conjuncts_of(const Expr& expr, std::vector<const Expr*>& out) {
  if (expr.kind == ExprKind::binary_op && expr.text == "AND") {
    conjuncts_of(expr.args[0], out);
    conjuncts_of(expr.args[1], out);
    return;
  }
  out.push_back(&expr);
}

bool is_comparison_op(const std::string& op) {
  return op == "=" || op == "!=" || op == "<>" || op == "<" || op == "<=" || op == ">" ||
         op == ">=" || op == "LIKE" || op == "IS" || op == "IS NOT";
}

struct Harvester {
  const Resolution::SelectContext* ctx = nullptr;
  QueryFeatures* features = nullptr;

  /// Classifies and records one conjunct. Returns the normalized forms of
  /// the constraints recorded (used for ON-clause sets).
  std::vector<std::string> harvest_conjunct(const Expr& conjunct) {
    std::vector<std::string> recorded;
    auto record = [&](ResolvedConstraint c, bool join) {
      recorded.push_back(c.normalized());
      if (join) {
        features->join_constraints.push_back(std::move(c));
      } else {
        features->non_join_constraints.push_back(std::move(c));
      }
    };

    auto classify_and_record = [&](const Expr& lhs_raw, const std::string& op,
                                   const Expr* rhs_raw) {
      auto lhs_names = ctx->binding_names(lhs_raw);
      std::set<std::string> rhs_names;
      if (rhs_raw) rhs_names = ctx->binding_names(*rhs_raw);
      if (lhs_names.empty() && rhs_names.empty()) return;  // constant predicate
      bool disjoint = true;
      for (const auto& n : lhs_names) {
        if (rhs_names.count(n)) disjoint = false;
      }
      std::set<std::string> all = lhs_names;
      all.insert(rhs_names.begin(), rhs_names.end());
      bool join = all.size() >= 2 && disjoint && !lhs_names.empty() && !rhs_names.empty();

      ResolvedConstraint c;
      c.lhs = ctx->resolve(lhs_raw);
      c.op = op;
      if (rhs_raw) c.rhs = ctx->resolve(*rhs_raw);
      record(std::move(c), join);
    };

    switch (conjunct.kind) {
      case ExprKind::binary_op:
        if (is_comparison_op(conjunct.text)) {
          classify_and_record(conjunct.args[0], strings::to_lower(conjunct.text),
                              &conjunct.args[1]);
        }
        break;
      case ExprKind::between:
        classify_and_record(conjunct.args[0], ">=", &conjunct.args[1]);
        classify_and_record(conjunct.args[0], "<=", &conjunct.args[2]);
        break;
      case ExprKind::is_null: {
        auto names = ctx->binding_names(conjunct.args[0]);
        if (!names.empty()) {
          ResolvedConstraint c;
          c.lhs = ctx->resolve(conjunct.args[0]);
          c.op = conjunct.negated ? "is not null" : "is null";
          record(std::move(c), false);
        }
        break;
      }
      case ExprKind::in_list: {
        auto names = ctx->binding_names(conjunct.args[0]);
        if (!names.empty()) {
          ResolvedConstraint c;
          c.lhs = ctx->resolve(conjunct.args[0]);
          c.op = conjunct.negated ? "not in" : "in";
          Expr list;
          list.kind = ExprKind::func_call;
          list.text = "list";
          for (std::size_t i = 1; i < conjunct.args.size(); ++i) {
            list.args.push_back(ctx->resolve(conjunct.args[i]));
          }
          c.rhs = std::move(list);
          record(std::move(c), false);
        }
        break;
      }
      default:
        break;  // OR trees, EXISTS, NOT: not individual field constraints
    }
    return recorded;
  }
};

}  // namespace

QueryFeatures extract_features(const QueryAst& ast, const SchemaMap& schema) {
  Resolution resolution(ast, schema);
  QueryFeatures features;
  features.complexity = ast.node_count();
  features.tables_referenced = resolution.tables_referenced();
  features.fields_referenced = resolution.fields_referenced();

  resolution.visit_selects([&](const Resolution::SelectContext& ctx) {
    const Select& select = ctx.select();
    Harvester harvester{&ctx, &features};

    // Select-list features.
    for (const auto& item : select.items) {
      if (item.expr.kind == ExprKind::star) continue;
      Expr formula = ctx.resolve(item.expr);
      bool trivial_alias =
          !item.alias.empty() && item.expr.kind == ExprKind::column &&
          strings::iequals(item.alias, item.expr.text);
      if (!item.alias.empty() && !trivial_alias) {
        features.named_select_fields.emplace_back(item.alias, std::move(formula));
      } else if (ctx.is_top()) {
        features.unnamed_select_fields.push_back(std::move(formula));
      }
    }

    // WHERE / HAVING conjuncts.
    std::vector<const Expr*> conjuncts;
    if (select.where) conjuncts_of(*select.where, conjuncts);
    if (select.having) conjuncts_of(*select.having, conjuncts);
    for (const auto* conjunct : conjuncts) {
      harvester.harvest_conjunct(*conjunct);
    }

    // ON clauses: constraints recorded individually plus as co-occurring sets.
    for (const auto& ref : select.from) {
      if (!ref.on) continue;
      std::vector<const Expr*> on_conjuncts;
      conjuncts_of(*ref.on, on_conjuncts);
      std::set<std::string> clause_set;
      for (const auto* conjunct : on_conjuncts) {
        for (auto& normalized : harvester.harvest_conjunct(*conjunct)) {
          clause_set.insert(std::move(normalized));
        }
      }
      if (!clause_set.empty()) features.on_clause_sets.push_back(std::move(clause_set));
    }

    // Group-by formulas and per-clause sets.
    if (!select.group_by.empty()) {
      std::set<std::string> group_set;
      for (const auto& g : select.group_by) {
        Expr formula = ctx.resolve(g);
        group_set.insert(strings::to_lower(render_formula(formula)));
        features.group_by_formulas.push_back(std::move(formula));
      }
      features.group_by_sets.push_back(std::move(group_set));
    }

    for (const auto& cte : select.ctes) {
      features.with_subquery_names.push_back(cte.name);
    }
  });

  return features;
}

std::string to_json(const QueryFeatures& f) {
  ordered_json j;
  ordered_json named = ordered_json::array();
  for (const auto& [name, formula] : f.named_select_fields) {
    named.push_back({{"name", name}, {"formula", render_formula(formula)}});
  }
  j["named_select_fields"] = std::move(named);
  ordered_json unnamed = ordered_json::array();
  for (const auto& formula : f.unnamed_select_fields) {
    unnamed.push_back(render_formula(formula));
  }
  j["unnamed_select_fields"] = std::move(unnamed);
  auto constraint_array = [](const std::vector<ResolvedConstraint>& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : list) arr.push_back(c.normalized());
    return arr;
  };
  j["non_join_constraints"] = constraint_array(f.non_join_constraints);
  j["join_constraints"] = constraint_array(f.join_constraints);
  ordered_json on_sets = ordered_json::array();
  for (const auto& s : f.on_clause_sets) on_sets.push_back(s);
  j["on_clause_sets"] = std::move(on_sets);
  ordered_json group_formulas = ordered_json::array();
  for (const auto& g : f.group_by_formulas) group_formulas.push_back(render_formula(g));
  j["group_by_formulas"] = std::move(group_formulas);
  ordered_json group_sets = ordered_json::array();
  for (const auto& s : f.group_by_sets) group_sets.push_back(s);
  j["group_by_sets"] = std::move(group_sets);
  j["with_subquery_names"] = f.with_subquery_names;
  j["tables_referenced"] = f.tables_referenced;
  ordered_json fields = ordered_json::array();
  for (const auto& ref : f.fields_referenced) fields.push_back(ref.key());
  j["fields_referenced"] = std::move(fields);
  j["complexity"] = f.complexity;
  return j.dump();
}

}  // namespace metaforge::sql
