#include <set>

#include "metaforge/common.hpp"
#include "metaforge/sql/ast.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::sql {

namespace {

bool select_ptr_equal(const std::shared_ptr<Select>& a, const std::shared_ptr<Select>& b) {
  if (!a && !b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

const std::set<std::string>& render_keywords() {
  static const std::set<std::string> kWords = {
      "select", "from",  "where", "group", "by",   "having", "order",  "limit",
      "offset", "as",    "on",    "join",  "inner", "left",  "right",  "outer",
      "cross",  "and",   "or",    "not",   "in",    "like",  "between", "is",
      "null",   "case",  "when",  "then",  "else",  "end",   "cast",   "distinct",
      "exists", "with",  "asc",   "desc",  "union", "except", "intersect",
  };
  return kWords;
}

struct RenderOpts {
  bool lowercase_idents = false;
};

std::string ident(const std::string& name, const RenderOpts& opts) {
  std::string text = opts.lowercase_idents ? strings::to_lower(name) : name;
  if (is_plain_identifier(text) && !render_keywords().count(strings::to_lower(text))) {
    return text;
  }
  return quote_identifier(text);
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::binary_op:
      if (e.text == "OR") return 1;
      if (e.text == "AND") return 2;
      if (e.text == "||") return 7;
      if (e.text == "*" || e.text == "/" || e.text == "%") return 6;
      if (e.text == "+" || e.text == "-") return 5;
      return 4;  // comparisons, LIKE, IS
    case ExprKind::unary_op:
      return e.text == "NOT" ? 3 : 8;
    case ExprKind::is_null:
    case ExprKind::in_list:
    case ExprKind::in_subquery:
    case ExprKind::between:
      return 4;
    default:
      return 9;
  }
}

std::string render_expr_impl(const Expr& e, const RenderOpts& opts);
std::string render_select_impl(const Select& s, const RenderOpts& opts);

std::string child(const Expr& parent, const Expr& sub, bool tight, const RenderOpts& opts) {
  int pp = precedence(parent), cp = precedence(sub);
  std::string text = render_expr_impl(sub, opts);
  if (cp < pp || (tight && cp == pp)) return "(" + text + ")";
  return text;
}

std::string quote_string(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += '\'';
  return out;
}

std::string render_expr_impl(const Expr& e, const RenderOpts& opts) {
  switch (e.kind) {
    case ExprKind::column:
      if (e.qualifier.empty()) return ident(e.text, opts);
      return ident(e.qualifier, opts) + "." + ident(e.text, opts);
    case ExprKind::star:
      return e.qualifier.empty() ? "*" : ident(e.qualifier, opts) + ".*";
    case ExprKind::string_lit:
      return quote_string(e.text);
    case ExprKind::int_lit:
    case ExprKind::real_lit:
      return e.text;
    case ExprKind::null_lit:
      return "NULL";
    case ExprKind::unary_op: {
      const auto& arg = e.args[0];
      if (e.text == "NOT") return "NOT " + child(e, arg, false, opts);
      return e.text + child(e, arg, false, opts);
    }
    case ExprKind::binary_op: {
      std::string op = e.text;
      return child(e, e.args[0], false, opts) + " " + op + " " +
             child(e, e.args[1], true, opts);
    }
    case ExprKind::func_call: {
      std::string out = e.text + "(";
      if (e.star_arg) {
        out += "*";
      } else {
        if (e.distinct) out += "DISTINCT ";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          if (i) out += ", ";
          out += render_expr_impl(e.args[i], opts);
        }
      }
      return out + ")";
    }
    case ExprKind::case_expr: {
      std::string out = "CASE";
      std::size_t i = 0;
      if (e.has_base) out += " " + render_expr_impl(e.args[i++], opts);
      std::size_t stop = e.args.size() - (e.has_else ? 1 : 0);
      for (; i + 1 < stop; i += 2) {
        out += " WHEN " + render_expr_impl(e.args[i], opts);
        out += " THEN " + render_expr_impl(e.args[i + 1], opts);
      }
      if (e.has_else) out += " ELSE " + render_expr_impl(e.args.back(), opts);
      return out + " END";
    }
    case ExprKind::cast_expr:
      return "CAST(" + render_expr_impl(e.args[0], opts) + " AS " +
             strings::to_lower(e.text) + ")";
    case ExprKind::subquery:
      return "(" + render_select_impl(*e.select, opts) + ")";
    case ExprKind::exists:
      return "EXISTS (" + render_select_impl(*e.select, opts) + ")";
    case ExprKind::in_list: {
      std::string out = child(e, e.args[0], false, opts);
      out += e.negated ? " NOT IN (" : " IN (";
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        out += render_expr_impl(e.args[i], opts);
      }
      return out + ")";
    }
    case ExprKind::in_subquery:
      return child(e, e.args[0], false, opts) + (e.negated ? " NOT IN (" : " IN (") +
             render_select_impl(*e.select, opts) + ")";
    case ExprKind::between:
      return child(e, e.args[0], false, opts) + (e.negated ? " NOT BETWEEN " : " BETWEEN ") +
             child(e, e.args[1], true, opts) + " AND " + child(e, e.args[2], true, opts);
    case ExprKind::is_null:
      return child(e, e.args[0], false, opts) + (e.negated ? " IS NOT NULL" : " IS NULL");
  }
  throw Error(ErrorKind::io, "unrenderable expression");
}

std::string render_select_impl(const Select& s, const RenderOpts& opts) {
  std::string out;
  if (!s.ctes.empty()) {
    out += "WITH ";
    for (std::size_t i = 0; i < s.ctes.size(); ++i) {
      if (i) out += ", ";
      out += ident(s.ctes[i].name, opts) + " AS (" +
             render_select_impl(*s.ctes[i].query, opts) + ")";
    }
    out += " ";
  }
  out += "SELECT ";
  if (s.distinct) out += "DISTINCT ";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ", ";
    out += render_expr_impl(s.items[i].expr, opts);
    if (!s.items[i].alias.empty()) out += " AS " + ident(s.items[i].alias, opts);
  }
  for (std::size_t i = 0; i < s.from.size(); ++i) {
    const auto& ref = s.from[i];
    if (i == 0) {
      out += " FROM ";
    } else {
      switch (ref.join) {
        case JoinKind::comma: out += ", "; break;
        case JoinKind::inner: out += " INNER JOIN "; break;
        case JoinKind::left: out += " LEFT JOIN "; break;
        case JoinKind::cross: out += " CROSS JOIN "; break;
        case JoinKind::none: out += ", "; break;
      }
    }
    if (ref.is_subquery) {
      out += "(" + render_select_impl(*ref.subquery, opts) + ")";
    } else {
      out += ident(ref.table, opts);
    }
    if (!ref.alias.empty()) out += " AS " + ident(ref.alias, opts);
    if (ref.on) out += " ON " + render_expr_impl(*ref.on, opts);
  }
  if (s.where) out += " WHERE " + render_expr_impl(*s.where, opts);
  if (!s.group_by.empty()) {
    out += " GROUP BY ";
    for (std::size_t i = 0; i < s.group_by.size(); ++i) {
      if (i) out += ", ";
      out += render_expr_impl(s.group_by[i], opts);
    }
  }
  if (s.having) out += " HAVING " + render_expr_impl(*s.having, opts);
  if (!s.order_by.empty()) {
    out += " ORDER BY ";
    for (std::size_t i = 0; i < s.order_by.size(); ++i) {
      if (i) out += ", ";
      out += render_expr_impl(s.order_by[i].expr, opts);
      if (s.order_by[i].has_direction) out += s.order_by[i].ascending ? " ASC" : " DESC";
    }
  }
  if (s.limit) out += " LIMIT " + render_expr_impl(*s.limit, opts);
  if (s.offset) out += " OFFSET " + render_expr_impl(*s.offset, opts);
  return out;
}

}  // namespace

bool Expr::operator==(const Expr& other) const {
  return kind == other.kind && text == other.text && qualifier == other.qualifier &&
         distinct == other.distinct && negated == other.negated && star_arg == other.star_arg &&
         has_base == other.has_base && has_else == other.has_else && args == other.args &&
         select_ptr_equal(select, other.select);
}

std::size_t Expr::node_count() const {
  std::size_t n = 1;
  for (const auto& a : args) n += a.node_count();
  if (select) n += select->node_count();
  return n;
}

bool TableRef::operator==(const TableRef& other) const {
  return is_subquery == other.is_subquery && table == other.table && alias == other.alias &&
         join == other.join && on == other.on && select_ptr_equal(subquery, other.subquery);
}

bool SelectItem::operator==(const SelectItem& other) const {
  return expr == other.expr && alias == other.alias;
}

bool OrderItem::operator==(const OrderItem& other) const {
  return expr == other.expr && ascending == other.ascending &&
         has_direction == other.has_direction;
}

bool CteDef::operator==(const CteDef& other) const {
  return name == other.name && select_ptr_equal(query, other.query);
}

bool Select::operator==(const Select& other) const {
  return ctes == other.ctes && distinct == other.distinct && items == other.items &&
         from == other.from && where == other.where && group_by == other.group_by &&
         having == other.having && order_by == other.order_by && limit == other.limit &&
         offset == other.offset;
}

std::size_t Select::node_count() const {
  std::size_t n = 1;
  for (const auto& cte : ctes) n += 1 + cte.query->node_count();
  for (const auto& item : items) n += item.expr.node_count();
  for (const auto& ref : from) {
    n += 1;
    if (ref.subquery) n += ref.subquery->node_count();
    if (ref.on) n += ref.on->node_count();
  }
  if (where) n += where->node_count();
  for (const auto& g : group_by) n += g.node_count();
  if (having) n += having->node_count();
  for (const auto& o : order_by) n += o.expr.node_count();
  if (limit) n += limit->node_count();
  if (offset) n += offset->node_count();
  return n;
}

bool QueryAst::structurally_equal(const QueryAst& other) const {
  return select_ptr_equal(root, other.root);
}

Expr make_column(std::string qualifier, std::string name) {
  Expr e;
  e.kind = ExprKind::column;
  e.qualifier = std::move(qualifier);
  e.text = std::move(name);
  return e;
}

Expr make_string(std::string value) {
  Expr e;
  e.kind = ExprKind::string_lit;
  e.text = std::move(value);
  return e;
}

Expr make_int(std::string lexeme) {
  Expr e;
  e.kind = ExprKind::int_lit;
  e.text = std::move(lexeme);
  return e;
}

Expr make_binary(std::string op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::binary_op;
  e.text = std::move(op);
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr make_func(std::string name, std::vector<Expr> args, bool distinct) {
  Expr e;
  e.kind = ExprKind::func_call;
  e.text = strings::to_lower(name);
  e.distinct = distinct;
  e.args = std::move(args);
  return e;
}

std::string render(const QueryAst& ast) { return render_select_impl(*ast.root, {}); }

std::string render(const Select& select) { return render_select_impl(select, {}); }

std::string render_expr(const Expr& expr) { return render_expr_impl(expr, {}); }

std::string render_formula(const Expr& expr) {
  RenderOpts opts;
  opts.lowercase_idents = true;
  return render_expr_impl(expr, opts);
}

}  // namespace metaforge::sql
