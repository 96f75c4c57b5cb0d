#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace metaforge::sql {

struct Select;

enum class ExprKind {
  column,       // qualifier.text or bare text
  star,         // * or qualifier.*
  string_lit,   // text holds the unquoted value
  int_lit,      // text holds the lexeme
  real_lit,
  null_lit,
  unary_op,     // text: "-", "+", "NOT"; args[0]
  binary_op,    // text: operator; args[0], args[1]
  func_call,    // text: lowercased name; args; distinct flag; star_arg for count(*)
  case_expr,    // args: [base?] (when, then)* [else?] with has_base/has_else
  cast_expr,    // text: target type; args[0]
  subquery,     // scalar subquery
  exists,       // EXISTS (select)
  in_list,      // args[0] IN (args[1..]); negated for NOT IN
  in_subquery,  // args[0] IN (select)
  between,      // args[0] BETWEEN args[1] AND args[2]
  is_null,      // args[0] IS [NOT] NULL
};

struct Expr {
  ExprKind kind{};
  std::string text;
  std::string qualifier;
  bool distinct = false;
  bool negated = false;
  bool star_arg = false;  // count(*)
  bool has_base = false;  // case_expr
  bool has_else = false;  // case_expr
  std::vector<Expr> args;
  std::shared_ptr<Select> select;

  bool operator==(const Expr& other) const;

  std::size_t node_count() const;
};

Expr make_column(std::string qualifier, std::string name);
Expr make_string(std::string value);
Expr make_int(std::string lexeme);
Expr make_binary(std::string op, Expr lhs, Expr rhs);
Expr make_func(std::string name, std::vector<Expr> args, bool distinct = false);

enum class JoinKind { none, comma, inner, left, cross };

struct TableRef {
  bool is_subquery = false;
  std::string table;
  std::string alias;
  std::shared_ptr<Select> subquery;
  JoinKind join = JoinKind::none;
  std::optional<Expr> on;

  /// The name this item is addressed by inside the query.
  const std::string& binding_name() const { return alias.empty() ? table : alias; }

  bool operator==(const TableRef& other) const;
};

struct SelectItem {
  Expr expr;
  std::string alias;

  bool operator==(const SelectItem& other) const;
};

struct OrderItem {
  Expr expr;
  bool ascending = true;
  bool has_direction = false;

  bool operator==(const OrderItem& other) const;
};

struct CteDef {
  std::string name;
  std::shared_ptr<Select> query;

  bool operator==(const CteDef& other) const;
};

struct Select {
  std::vector<CteDef> ctes;
  bool distinct = false;
  std::vector<SelectItem> items;
  std::vector<TableRef> from;
  std::optional<Expr> where;
  std::vector<Expr> group_by;
  std::optional<Expr> having;
  std::vector<OrderItem> order_by;
  std::optional<Expr> limit;
  std::optional<Expr> offset;

  bool operator==(const Select& other) const;

  std::size_t node_count() const;
};

struct QueryAst {
  std::shared_ptr<Select> root;
  std::string dialect = "sqlite";

  bool structurally_equal(const QueryAst& other) const;
  std::size_t node_count() const { return root ? root->node_count() : 0; }
};

/// Canonical SQL text; parse(render(ast)) is structurally equal to ast.
std::string render(const QueryAst& ast);
std::string render(const Select& select);
std::string render_expr(const Expr& expr);

/// The paper-style flat formula rendering used in feature reports:
/// lowercase identifiers, minimal parentheses.
std::string render_formula(const Expr& expr);

}  // namespace metaforge::sql
