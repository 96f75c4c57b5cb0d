#include <algorithm>
#include <set>

#include "metaforge/common.hpp"
#include "metaforge/sql/parse.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::sql {

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> kWords = {
      "select", "from",  "where",  "group",  "by",     "having", "order",  "limit",
      "offset", "as",    "on",     "join",   "inner",  "left",   "right",  "outer",
      "cross",  "and",   "or",     "not",    "in",     "like",   "between", "is",
      "null",   "case",  "when",   "then",   "else",   "end",    "cast",   "distinct",
      "exists", "with",  "union",  "except", "intersect", "asc", "desc",
  };
  return kWords;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  QueryAst parse_statement() {
    QueryAst ast;
    ast.root = parse_select_with_ctes();
    accept_op(";");
    expect_end();
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  Token next() {
    Token tok = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return tok;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& tok = peek();
    std::string got = tok.kind == TokenKind::end ? "end of input" : "'" + tok.text + "'";
    throw Error(ErrorKind::parse, "expected " + expected + ", got " + got + " at line " +
                                      std::to_string(tok.line) + ", column " +
                                      std::to_string(tok.column));
  }

  bool is_kw(const Token& tok, std::string_view word) const {
    return tok.kind == TokenKind::keyword_or_ident && strings::iequals(tok.text, word);
  }

  bool accept_kw(std::string_view word) {
    if (is_kw(peek(), word)) {
      next();
      return true;
    }
    return false;
  }

  void expect_kw(std::string_view word) {
    if (!accept_kw(word)) fail("'" + std::string(word) + "'");
  }

  bool accept_op(std::string_view op) {
    if (peek().kind == TokenKind::op && peek().text == op) {
      next();
      return true;
    }
    return false;
  }

  void expect_op(std::string_view op) {
    if (!accept_op(op)) fail("'" + std::string(op) + "'");
  }

  void expect_end() {
    if (peek().kind != TokenKind::end) fail("end of statement");
  }

  bool at_select_start(std::size_t ahead = 0) const {
    return is_kw(peek(ahead), "select") || is_kw(peek(ahead), "with");
  }

  std::shared_ptr<Select> parse_select_with_ctes() {
    auto select = std::make_shared<Select>();
    if (accept_kw("with")) {
      do {
        CteDef cte;
        cte.name = expect_identifier("CTE name");
        expect_kw("as");
        expect_op("(");
        cte.query = parse_select_with_ctes();
        expect_op(")");
        select->ctes.push_back(std::move(cte));
      } while (accept_op(","));
    }
    parse_select_core(*select);
    return select;
  }

  std::string expect_identifier(const std::string& what) {
    const Token& tok = peek();
    if (tok.kind == TokenKind::quoted_ident) return next().text;
    if (tok.kind == TokenKind::keyword_or_ident &&
        !reserved_words().count(strings::to_lower(tok.text))) {
      return next().text;
    }
    fail(what);
  }

  void parse_select_core(Select& select) {
    expect_kw("select");
    select.distinct = accept_kw("distinct");
    do {
      select.items.push_back(parse_select_item());
    } while (accept_op(","));

    if (accept_kw("from")) {
      select.from.push_back(parse_table_ref(JoinKind::none));
      while (true) {
        if (accept_op(",")) {
          select.from.push_back(parse_table_ref(JoinKind::comma));
          continue;
        }
        JoinKind kind;
        if (accept_kw("inner")) {
          expect_kw("join");
          kind = JoinKind::inner;
        } else if (accept_kw("left")) {
          accept_kw("outer");
          expect_kw("join");
          kind = JoinKind::left;
        } else if (accept_kw("cross")) {
          expect_kw("join");
          kind = JoinKind::cross;
        } else if (accept_kw("join")) {
          kind = JoinKind::inner;
        } else {
          break;
        }
        auto ref = parse_table_ref(kind);
        if (accept_kw("on")) ref.on = parse_expr();
        select.from.push_back(std::move(ref));
      }
    }
    if (accept_kw("where")) select.where = parse_expr();
    if (accept_kw("group")) {
      expect_kw("by");
      do {
        select.group_by.push_back(parse_expr());
      } while (accept_op(","));
    }
    if (accept_kw("having")) select.having = parse_expr();
    if (accept_kw("order")) {
      expect_kw("by");
      do {
        OrderItem item;
        item.expr = parse_expr();
        if (accept_kw("asc")) {
          item.ascending = true;
          item.has_direction = true;
        } else if (accept_kw("desc")) {
          item.ascending = false;
          item.has_direction = true;
        }
        select.order_by.push_back(std::move(item));
      } while (accept_op(","));
    }
    if (accept_kw("limit")) {
      auto first = parse_expr();
      if (accept_op(",")) {
        // LIMIT offset, count
        select.offset = std::move(first);
        select.limit = parse_expr();
      } else {
        select.limit = std::move(first);
        if (accept_kw("offset")) select.offset = parse_expr();
      }
    }
  }

  SelectItem parse_select_item() {
    SelectItem item;
    item.expr = parse_expr();
    if (accept_kw("as")) {
      item.alias = expect_identifier("alias after AS");
    } else if (peek().kind == TokenKind::quoted_ident ||
               (peek().kind == TokenKind::keyword_or_ident &&
                !reserved_words().count(strings::to_lower(peek().text)))) {
      item.alias = next().text;
    }
    return item;
  }

  TableRef parse_table_ref(JoinKind kind) {
    TableRef ref;
    ref.join = kind;
    if (peek().kind == TokenKind::op && peek().text == "(") {
      next();
      ref.is_subquery = true;
      ref.subquery = parse_select_with_ctes();
      expect_op(")");
    } else {
      ref.table = expect_identifier("table name");
    }
    if (accept_kw("as")) {
      ref.alias = expect_identifier("alias after AS");
    } else if (peek().kind == TokenKind::quoted_ident ||
               (peek().kind == TokenKind::keyword_or_ident &&
                !reserved_words().count(strings::to_lower(peek().text)))) {
      ref.alias = next().text;
    }
    if (ref.is_subquery && ref.alias.empty()) fail("alias for subquery");
    return ref;
  }

  // precedence: OR < AND < NOT < comparison < + - < * / % < || < unary < primary
  Expr parse_expr() { return parse_or(); }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (accept_kw("or")) {
      Expr node;
      node.kind = ExprKind::binary_op;
      node.text = "OR";
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_and());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (accept_kw("and")) {
      Expr node;
      node.kind = ExprKind::binary_op;
      node.text = "AND";
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_not());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_not() {
    if (accept_kw("not")) {
      Expr node;
      node.kind = ExprKind::unary_op;
      node.text = "NOT";
      node.args.push_back(parse_not());
      return node;
    }
    return parse_comparison();
  }

  Expr parse_comparison() {
    Expr lhs = parse_additive();
    while (true) {
      const Token& tok = peek();
      if (tok.kind == TokenKind::op &&
          (tok.text == "=" || tok.text == "==" || tok.text == "!=" || tok.text == "<>" ||
           tok.text == "<" || tok.text == "<=" || tok.text == ">" || tok.text == ">=")) {
        std::string op = next().text;
        if (op == "==") op = "=";
        Expr node;
        node.kind = ExprKind::binary_op;
        node.text = op;
        node.args.push_back(std::move(lhs));
        node.args.push_back(parse_additive());
        lhs = std::move(node);
        continue;
      }
      if (is_kw(tok, "is")) {
        next();
        bool negated = accept_kw("not");
        if (accept_kw("null")) {
          Expr node;
          node.kind = ExprKind::is_null;
          node.negated = negated;
          node.args.push_back(std::move(lhs));
          lhs = std::move(node);
        } else {
          Expr node;
          node.kind = ExprKind::binary_op;
          node.text = negated ? "IS NOT" : "IS";
          node.args.push_back(std::move(lhs));
          node.args.push_back(parse_additive());
          lhs = std::move(node);
        }
        continue;
      }
      bool negated = false;
      std::size_t save = pos_;
      if (is_kw(tok, "not")) {
        next();
        negated = true;
      }
      if (accept_kw("in")) {
        expect_op("(");
        Expr node;
        node.negated = negated;
        node.args.push_back(std::move(lhs));
        if (at_select_start()) {
          node.kind = ExprKind::in_subquery;
          node.select = parse_select_with_ctes();
        } else {
          node.kind = ExprKind::in_list;
          do {
            node.args.push_back(parse_expr());
          } while (accept_op(","));
        }
        expect_op(")");
        lhs = std::move(node);
        continue;
      }
      if (accept_kw("like")) {
        Expr like;
        like.kind = ExprKind::binary_op;
        like.text = "LIKE";
        like.args.push_back(std::move(lhs));
        like.args.push_back(parse_additive());
        if (negated) {
          Expr wrap;
          wrap.kind = ExprKind::unary_op;
          wrap.text = "NOT";
          wrap.args.push_back(std::move(like));
          lhs = std::move(wrap);
        } else {
          lhs = std::move(like);
        }
        continue;
      }
      if (accept_kw("between")) {
        Expr node;
        node.kind = ExprKind::between;
        node.negated = negated;
        node.args.push_back(std::move(lhs));
        node.args.push_back(parse_additive());
        expect_kw("and");
        node.args.push_back(parse_additive());
        lhs = std::move(node);
        continue;
      }
      if (negated) {
        pos_ = save;  // the NOT belongs to an enclosing context
      }
      break;
    }
    return lhs;
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (peek().kind == TokenKind::op && (peek().text == "+" || peek().text == "-")) {
      std::string op = next().text;
      Expr node;
      node.kind = ExprKind::binary_op;
      node.text = op;
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_multiplicative());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_concat();
    while (peek().kind == TokenKind::op &&
           (peek().text == "*" || peek().text == "/" || peek().text == "%")) {
      std::string op = next().text;
      Expr node;
      node.kind = ExprKind::binary_op;
      node.text = op;
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_concat());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_concat() {
    Expr lhs = parse_unary();
    while (peek().kind == TokenKind::op && peek().text == "||") {
      next();
      Expr node;
      node.kind = ExprKind::binary_op;
      node.text = "||";
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_unary());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek().kind == TokenKind::op && (peek().text == "-" || peek().text == "+")) {
      std::string op = next().text;
      Expr node;
      node.kind = ExprKind::unary_op;
      node.text = op;
      node.args.push_back(parse_unary());
      return node;
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& tok = peek();
    if (tok.kind == TokenKind::number) {
      Expr node;
      node.kind = tok.is_real ? ExprKind::real_lit : ExprKind::int_lit;
      node.text = next().text;
      return node;
    }
    if (tok.kind == TokenKind::string_lit) {
      Expr node;
      node.kind = ExprKind::string_lit;
      node.text = next().text;
      return node;
    }
    if (is_kw(tok, "null")) {
      next();
      Expr node;
      node.kind = ExprKind::null_lit;
      return node;
    }
    if (is_kw(tok, "case")) return parse_case();
    if (is_kw(tok, "cast")) {
      next();
      expect_op("(");
      Expr node;
      node.kind = ExprKind::cast_expr;
      node.args.push_back(parse_expr());
      expect_kw("as");
      std::string type;
      while (peek().kind == TokenKind::keyword_or_ident) {
        if (!type.empty()) type += ' ';
        type += strings::to_lower(next().text);
      }
      if (accept_op("(")) {
        type += "(";
        type += next().text;
        if (accept_op(",")) {
          type += ",";
          type += next().text;
        }
        expect_op(")");
        type += ")";
      }
      if (type.empty()) fail("type name in CAST");
      node.text = type;
      expect_op(")");
      return node;
    }
    if (is_kw(tok, "exists")) {
      next();
      expect_op("(");
      Expr node;
      node.kind = ExprKind::exists;
      node.select = parse_select_with_ctes();
      expect_op(")");
      return node;
    }
    if (tok.kind == TokenKind::op && tok.text == "(") {
      next();
      if (at_select_start()) {
        Expr node;
        node.kind = ExprKind::subquery;
        node.select = parse_select_with_ctes();
        expect_op(")");
        return node;
      }
      Expr inner = parse_expr();
      expect_op(")");
      return inner;
    }
    if (tok.kind == TokenKind::op && tok.text == "*") {
      next();
      Expr node;
      node.kind = ExprKind::star;
      return node;
    }
    if (tok.kind == TokenKind::keyword_or_ident || tok.kind == TokenKind::quoted_ident) {
      bool quoted = tok.kind == TokenKind::quoted_ident;
      if (!quoted && reserved_words().count(strings::to_lower(tok.text))) {
        fail("expression");
      }
      std::string first = next().text;
      // function call
      if (!quoted && peek().kind == TokenKind::op && peek().text == "(") {
        next();
        Expr node;
        node.kind = ExprKind::func_call;
        node.text = strings::to_lower(first);
        if (peek().kind == TokenKind::op && peek().text == "*") {
          next();
          node.star_arg = true;
        } else if (!(peek().kind == TokenKind::op && peek().text == ")")) {
          node.distinct = accept_kw("distinct");
          do {
            node.args.push_back(parse_expr());
          } while (accept_op(","));
        }
        expect_op(")");
        return node;
      }
      if (accept_op(".")) {
        if (peek().kind == TokenKind::op && peek().text == "*") {
          next();
          Expr node;
          node.kind = ExprKind::star;
          node.qualifier = first;
          return node;
        }
        Expr node;
        node.kind = ExprKind::column;
        node.qualifier = first;
        node.text = expect_identifier("column name after '.'");
        return node;
      }
      Expr node;
      node.kind = ExprKind::column;
      node.text = first;
      return node;
    }
    fail("expression");
  }

  Expr parse_case() {
    expect_kw("case");
    Expr node;
    node.kind = ExprKind::case_expr;
    if (!is_kw(peek(), "when")) {
      node.has_base = true;
      node.args.push_back(parse_expr());
    }
    while (accept_kw("when")) {
      node.args.push_back(parse_expr());
      expect_kw("then");
      node.args.push_back(parse_expr());
    }
    if (node.args.size() <= static_cast<std::size_t>(node.has_base ? 1 : 0)) {
      fail("WHEN clause in CASE");
    }
    if (accept_kw("else")) {
      node.has_else = true;
      node.args.push_back(parse_expr());
    }
    expect_kw("end");
    return node;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

QueryAst parse_sql(const std::string& text, const std::string& dialect) {
  if (strings::trim(text).empty()) {
    throw Error(ErrorKind::parse, "empty SQL text");
  }
  if (dialect != "sqlite") {
    throw Error(ErrorKind::config, "unsupported dialect: " + dialect);
  }
  Parser parser(lex_sql(text));
  auto ast = parser.parse_statement();
  ast.dialect = dialect;
  return ast;
}

}  // namespace metaforge::sql
