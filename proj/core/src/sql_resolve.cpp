#include "metaforge/sql/resolve.hpp"

#include <algorithm>

#include "metaforge/util/strings.hpp"

namespace metaforge::sql {

const SummaryField* SubquerySummary::find(std::string_view name) const {
  for (const auto& f : fields) {
    if (strings::iequals(f.name, name)) return &f;
  }
  return nullptr;
}

namespace {

struct RangeVar {
  std::string binding;           // alias or table name as written
  bool is_base = false;
  std::string base_table;        // declared case (base only)
  std::vector<std::string> base_columns;  // declared case (base only)
  const SubquerySummary* summary = nullptr;  // subquery or CTE
};

}  // namespace

struct ScopeNode {
  const Select* select = nullptr;
  const ScopeNode* parent = nullptr;
  bool is_top = false;
  std::vector<RangeVar> range_vars;
  std::map<std::string, SubquerySummary> cte_summaries;  // lowercased name
  SubquerySummary summary;
  std::vector<std::unique_ptr<ScopeNode>> children;
};

struct Resolution::Impl {
  const SchemaMap* schema = nullptr;
  std::unique_ptr<ScopeNode> root;
  std::set<FieldRef> fields_referenced;
  std::set<std::string> tables_referenced;

  const std::vector<std::string>* schema_columns(std::string_view table,
                                                 std::string* declared_name) const {
    for (const auto& [name, cols] : *schema) {
      if (strings::iequals(name, table)) {
        if (declared_name) *declared_name = name;
        return &cols;
      }
    }
    return nullptr;
  }

  /// Looks up a CTE summary through the scope chain.
  const SubquerySummary* find_cte(const ScopeNode* scope, std::string_view name) const {
    for (const ScopeNode* s = scope; s; s = s->parent) {
      auto it = s->cte_summaries.find(strings::to_lower(std::string(name)));
      if (it != s->cte_summaries.end()) return &it->second;
    }
    return nullptr;
  }

  ScopeNode* build_scope(const Select& select, ScopeNode* parent, bool is_top) {
    auto node = std::make_unique<ScopeNode>();
    ScopeNode* raw = node.get();
    raw->select = &select;
    raw->parent = parent;
    raw->is_top = is_top;

    // CTEs first: each resolves in the enclosing scope extended by the
    // CTEs declared before it.
    for (const auto& cte : select.ctes) {
      ScopeNode* cte_scope = build_scope(*cte.query, raw, false);
      raw->cte_summaries[strings::to_lower(cte.name)] = cte_scope->summary;
    }

    // Range variables from the FROM clause; from-subqueries summarize first.
    for (const auto& ref : select.from) {
      RangeVar rv;
      rv.binding = ref.binding_name();
      if (ref.is_subquery) {
        ScopeNode* sub = build_scope(*ref.subquery, raw, false);
        rv.summary = &sub->summary;
      } else if (const SubquerySummary* cte = find_cte(raw, ref.table)) {
        rv.summary = cte;
      } else {
        std::string declared;
        const auto* cols = schema_columns(ref.table, &declared);
        if (!cols) {
          throw Error(ErrorKind::resolution, "unknown table: " + ref.table);
        }
        rv.is_base = true;
        rv.base_table = declared;
        rv.base_columns = *cols;
        tables_referenced.insert(declared);
      }
      raw->range_vars.push_back(std::move(rv));
    }

    // Select list -> summary (stars expand via the range variables).
    for (const auto& item : select.items) {
      append_item(raw, item);
    }

    // Resolve the remaining clauses so unknown references fail loudly and
    // fields_referenced is complete.
    for (const auto& ref : select.from) {
      if (ref.on) resolve_expr(raw, *ref.on);
    }
    if (select.where) resolve_expr(raw, *select.where);
    for (const auto& g : select.group_by) resolve_expr(raw, g);
    if (select.having) resolve_expr(raw, *select.having);
    for (const auto& o : select.order_by) resolve_expr(raw, o.expr);

    ScopeNode* result = raw;
    if (parent) {
      parent->children.push_back(std::move(node));
    } else {
      root = std::move(node);
    }
    return result;
  }

  void append_star(ScopeNode* scope, const RangeVar& rv) {
    if (rv.is_base) {
      for (const auto& col : rv.base_columns) {
        SummaryField f;
        f.name = col;
        f.formula = make_column(rv.base_table, col);
        f.source_column = col;
        fields_referenced.insert({rv.base_table, col});
        scope->summary.fields.push_back(std::move(f));
      }
    } else {
      for (const auto& f : rv.summary->fields) {
        SummaryField copy = f;
        copy.has_alias = false;
        scope->summary.fields.push_back(std::move(copy));
      }
    }
  }

  void append_item(ScopeNode* scope, const SelectItem& item) {
    if (item.expr.kind == ExprKind::star) {
      if (item.expr.qualifier.empty()) {
        for (const auto& rv : scope->range_vars) append_star(scope, rv);
      } else {
        const RangeVar* rv = find_range_var(scope, item.expr.qualifier);
        if (!rv) {
          throw Error(ErrorKind::resolution,
                      "unknown table or alias: " + item.expr.qualifier);
        }
        append_star(scope, *rv);
      }
      return;
    }
    SummaryField f;
    f.formula = resolve_expr(scope, item.expr);
    if (!item.alias.empty()) {
      f.name = item.alias;
      f.has_alias = true;
    } else if (item.expr.kind == ExprKind::column) {
      f.name = f.formula.kind == ExprKind::column ? f.formula.text : item.expr.text;
    } else {
      f.name = render_expr(item.expr);
    }
    if (item.expr.kind == ExprKind::column) {
      f.source_column = f.formula.kind == ExprKind::column ? f.formula.text : item.expr.text;
    }
    scope->summary.fields.push_back(std::move(f));
  }

  static const RangeVar* find_range_var(const ScopeNode* scope, std::string_view binding) {
    for (const ScopeNode* s = scope; s; s = s->parent) {
      for (const auto& rv : s->range_vars) {
        if (strings::iequals(rv.binding, binding)) return &rv;
      }
    }
    return nullptr;
  }

  Expr formula_for(const RangeVar& rv, const std::string& column) {
    if (rv.is_base) {
      for (const auto& col : rv.base_columns) {
        if (strings::iequals(col, column)) {
          fields_referenced.insert({rv.base_table, col});
          return make_column(rv.base_table, col);
        }
      }
      throw Error(ErrorKind::resolution,
                  "unknown column " + rv.binding + "." + column + " (table " + rv.base_table +
                      ")");
    }
    if (const SummaryField* f = rv.summary->find(column)) {
      return f->formula;
    }
    throw Error(ErrorKind::resolution,
                "subquery " + rv.binding + " exports no field named " + column);
  }

  Expr resolve_column(const ScopeNode* scope, const Expr& expr) {
    if (!expr.qualifier.empty()) {
      const RangeVar* rv = find_range_var(scope, expr.qualifier);
      if (!rv) {
        throw Error(ErrorKind::resolution, "unknown table or alias: " + expr.qualifier);
      }
      return formula_for(*rv, expr.text);
    }
    // Unqualified: unique membership in the nearest scope that has a match.
    for (const ScopeNode* s = scope; s; s = s->parent) {
      std::vector<const RangeVar*> hits;
      for (const auto& rv : s->range_vars) {
        if (rv.is_base) {
          for (const auto& col : rv.base_columns) {
            if (strings::iequals(col, expr.text)) {
              hits.push_back(&rv);
              break;
            }
          }
        } else if (rv.summary->find(expr.text)) {
          hits.push_back(&rv);
        }
      }
      if (hits.size() > 1) {
        std::string candidates;
        for (const auto* rv : hits) {
          if (!candidates.empty()) candidates += ", ";
          candidates += rv->binding + "." + expr.text;
        }
        throw Error(ErrorKind::ambiguity,
                    "ambiguous column " + expr.text + "; candidates: " + candidates);
      }
      if (hits.size() == 1) return formula_for(*hits[0], expr.text);
    }
    throw Error(ErrorKind::resolution, "unknown column: " + expr.text);
  }

  /// Rewrites an expression into a base-column formula. Expression
  /// subqueries stay in place syntactically but are resolved in their own
  /// scope so every referenced field is accounted for. During re-resolution
  /// (feature extraction asking again) existing scopes are reused and no
  /// new ones are built.
  Expr resolve_expr(ScopeNode* scope, const Expr& expr, bool build_subscopes = true) {
    switch (expr.kind) {
      case ExprKind::column:
        return resolve_column(scope, expr);
      case ExprKind::subquery:
      case ExprKind::exists:
        if (build_subscopes) build_scope(*expr.select, scope, false);
        return expr;
      case ExprKind::in_subquery: {
        Expr out = expr;
        out.args.clear();
        out.args.push_back(resolve_expr(scope, expr.args[0], build_subscopes));
        if (build_subscopes) build_scope(*expr.select, scope, false);
        return out;
      }
      default: {
        Expr out = expr;
        out.args.clear();
        for (const auto& arg : expr.args) {
          out.args.push_back(resolve_expr(scope, arg, build_subscopes));
        }
        return out;
      }
    }
  }

  void collect_bindings(const ScopeNode* scope, const Expr& expr,
                        std::set<std::string>& out) const {
    if (expr.kind == ExprKind::column) {
      if (!expr.qualifier.empty()) {
        out.insert(strings::to_lower(expr.qualifier));
        return;
      }
      for (const ScopeNode* s = scope; s; s = s->parent) {
        for (const auto& rv : s->range_vars) {
          bool member = false;
          if (rv.is_base) {
            for (const auto& col : rv.base_columns) {
              if (strings::iequals(col, expr.text)) {
                member = true;
                break;
              }
            }
          } else {
            member = rv.summary->find(expr.text) != nullptr;
          }
          if (member) {
            out.insert(strings::to_lower(rv.binding));
            return;
          }
        }
      }
      return;
    }
    for (const auto& arg : expr.args) collect_bindings(scope, arg, out);
    // Expression subqueries count as opaque; correlation inside them does
    // not influence the enclosing predicate's classification.
  }

  void visit(const ScopeNode* node, const std::function<void(const SelectContext&)>& fn) const {
    fn(SelectContext(this, node));
    for (const auto& child : node->children) visit(child.get(), fn);
  }
};

Resolution::Resolution(const QueryAst& ast, const SchemaMap& schema)
    : impl_(std::make_unique<Impl>()) {
  if (!ast.root) throw Error(ErrorKind::resolution, "empty statement");
  impl_->schema = &schema;
  impl_->build_scope(*ast.root, nullptr, true);
}

Resolution::~Resolution() = default;
Resolution::Resolution(Resolution&&) noexcept = default;

const SubquerySummary& Resolution::top() const { return impl_->root->summary; }

const std::set<FieldRef>& Resolution::fields_referenced() const {
  return impl_->fields_referenced;
}

const std::set<std::string>& Resolution::tables_referenced() const {
  return impl_->tables_referenced;
}

const Select& Resolution::SelectContext::select() const {
  return *static_cast<const ScopeNode*>(node_)->select;
}

bool Resolution::SelectContext::is_top() const {
  return static_cast<const ScopeNode*>(node_)->is_top;
}

Expr Resolution::SelectContext::resolve(const Expr& expr) const {
  auto* impl = const_cast<Impl*>(static_cast<const Impl*>(impl_));
  auto* scope = const_cast<ScopeNode*>(static_cast<const ScopeNode*>(node_));
  return impl->resolve_expr(scope, expr, /*build_subscopes=*/false);
}

std::set<std::string> Resolution::SelectContext::binding_names(const Expr& expr) const {
  const auto* impl = static_cast<const Impl*>(impl_);
  const auto* scope = static_cast<const ScopeNode*>(node_);
  std::set<std::string> out;
  impl->collect_bindings(scope, expr, out);
  return out;
}

void Resolution::visit_selects(const std::function<void(const SelectContext&)>& fn) const {
  impl_->visit(impl_->root.get(), fn);
}

SubquerySummary resolve_fields(const QueryAst& ast, const SchemaMap& schema) {
  Resolution resolution(ast, schema);
  return resolution.top();
}

}  // namespace metaforge::sql
