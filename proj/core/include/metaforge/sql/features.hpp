#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/sql/resolve.hpp"

namespace metaforge::sql {

/// One predicate with both sides resolved to base-column formulas.
struct ResolvedConstraint {
  Expr lhs;
  std::string op;  // "=", "<", "like", "is null", "in", ...
  std::optional<Expr> rhs;

  bool is_equality() const { return op == "="; }
  bool both_plain_columns() const;

  /// Lowercased canonical text; equality operands are ordered so the
  /// lexicographically smaller side comes first (normalize(a=b) ==
  /// normalize(b=a)).
  std::string normalized() const;
};

/// The feature taxonomy extracted from one parsed query. Constraints and
/// group-bys are harvested at every nesting level; named select fields from
/// every level, unnamed ones from the top-level select list only.
struct QueryFeatures {
  std::vector<std::pair<std::string, Expr>> named_select_fields;
  std::vector<Expr> unnamed_select_fields;
  std::vector<ResolvedConstraint> non_join_constraints;
  std::vector<ResolvedConstraint> join_constraints;
  std::vector<std::set<std::string>> on_clause_sets;
  std::vector<Expr> group_by_formulas;
  std::vector<std::set<std::string>> group_by_sets;
  std::vector<std::string> with_subquery_names;
  std::set<std::string> tables_referenced;
  std::set<FieldRef> fields_referenced;
  std::size_t complexity = 0;  // AST node count

  /// Distinct normalized equality pairs R.f=S.g with plain columns on both
  /// sides, optionally prefixed with a database label.
  std::set<std::string> equality_join_pairs(const std::string& db_prefix = "") const;
};

/// An AS clause is trivial when the alias equals (case-insensitively) the
/// source column name.
QueryFeatures extract_features(const QueryAst& ast, const SchemaMap& schema);

std::string to_json(const QueryFeatures& features);

}  // namespace metaforge::sql
