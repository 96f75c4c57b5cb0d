#pragma once

#include <string>

#include "metaforge/sql/ast.hpp"

namespace metaforge::sql {

/// Parses one select statement (the SQLite-flavored subset used by
/// benchmark gold queries). Throws Error(parse) with line/column and the
/// offending token on syntax errors.
QueryAst parse_sql(const std::string& text, const std::string& dialect = "sqlite");

// --- lexer, exposed for tests ---

enum class TokenKind { keyword_or_ident, quoted_ident, string_lit, number, op, end };

struct Token {
  TokenKind kind{};
  std::string text;   // identifiers keep case; strings unquoted
  bool is_real = false;
  int line = 1;
  int column = 1;
};

std::vector<Token> lex_sql(const std::string& text);

}  // namespace metaforge::sql
