#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/sql/ast.hpp"

namespace metaforge::sql {

/// table -> declared column names. Lookups are case-insensitive; resolved
/// formulas use the declared spellings.
using SchemaMap = std::map<std::string, std::vector<std::string>>;

struct SummaryField {
  std::string name;  // exported name: alias, column name, or rendered expression
  Expr formula;      // expression over base-table columns
  bool has_alias = false;
  std::string source_column;  // set when the item was a plain column reference
};

/// Maps each field exported by a query to the formula computing it, with
/// every leaf column fully qualified by its base table.
struct SubquerySummary {
  std::vector<SummaryField> fields;

  const SummaryField* find(std::string_view name) const;
};

/// Resolves a whole statement: from-clause subqueries and CTEs are
/// summarized first, then their formulas substitute into enclosing
/// expressions. Unqualified columns bind by unique membership; failures
/// raise Error(resolution) or Error(ambiguity).
class Resolution {
 public:
  Resolution(const QueryAst& ast, const SchemaMap& schema);
  ~Resolution();
  Resolution(Resolution&&) noexcept;
  Resolution(const Resolution&) = delete;
  Resolution& operator=(const Resolution&) = delete;
  Resolution& operator=(Resolution&&) = delete;

  const SubquerySummary& top() const;

  /// Base columns referenced anywhere in the statement (including inside
  /// expression subqueries) and the base tables they come from.
  const std::set<FieldRef>& fields_referenced() const;
  const std::set<std::string>& tables_referenced() const;

  /// One context per SELECT node in the statement (top, from-subqueries,
  /// CTEs, and expression subqueries), in depth-first order.
  class SelectContext {
   public:
    const Select& select() const;
    bool is_top() const;
    /// Resolves an expression appearing in this select's clauses to a
    /// base-column formula.
    Expr resolve(const Expr& expr) const;
    /// Distinct range-variable binding names referenced by the expression
    /// (correlated references included).
    std::set<std::string> binding_names(const Expr& expr) const;

   private:
    friend class Resolution;
    SelectContext(const void* impl, const void* node) : impl_(impl), node_(node) {}
    const void* impl_;
    const void* node_;
  };

  void visit_selects(const std::function<void(const SelectContext&)>& fn) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper matching the paper's algorithm signature.
SubquerySummary resolve_fields(const QueryAst& ast, const SchemaMap& schema);

}  // namespace metaforge::sql
