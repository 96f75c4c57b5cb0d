#include <cctype>

#include "metaforge/common.hpp"
#include "metaforge/sql/parse.hpp"

namespace metaforge::sql {

std::vector<Token> lex_sql(const std::string& text) {
  std::vector<Token> tokens;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  };
  auto fail = [&](const std::string& message) {
    throw Error(ErrorKind::parse, message + " at line " + std::to_string(line) + ", column " +
                                      std::to_string(column));
  };

  while (i < text.size()) {
    char c = text[i];
    int tok_line = line, tok_col = column;
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    // comments
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') advance(text[i]), ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      advance(text[i]), ++i;
      advance(text[i]), ++i;
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/'))
        advance(text[i]), ++i;
      if (i + 1 >= text.size()) fail("unterminated comment");
      advance(text[i]), ++i;
      advance(text[i]), ++i;
      continue;
    }
    Token tok;
    tok.line = tok_line;
    tok.column = tok_col;
    if (c == '\'') {
      tok.kind = TokenKind::string_lit;
      advance(c), ++i;
      std::string value;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '\'') {
          if (i + 1 < text.size() && text[i + 1] == '\'') {
            value += '\'';
            advance(text[i]), ++i;
            advance(text[i]), ++i;
            continue;
          }
          advance(text[i]), ++i;
          closed = true;
          break;
        }
        value += text[i];
        advance(text[i]), ++i;
      }
      if (!closed) fail("unterminated string literal");
      tok.text = value;
      tokens.push_back(std::move(tok));
      continue;
    }
    if (c == '`' || c == '"' || c == '[') {
      char close = c == '[' ? ']' : c;
      tok.kind = TokenKind::quoted_ident;
      advance(c), ++i;
      std::string value;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == close) {
          if (close != ']' && i + 1 < text.size() && text[i + 1] == close) {
            value += close;
            advance(text[i]), ++i;
            advance(text[i]), ++i;
            continue;
          }
          advance(text[i]), ++i;
          closed = true;
          break;
        }
        value += text[i];
        advance(text[i]), ++i;
      }
      if (!closed) fail("unterminated quoted identifier");
      tok.text = value;
      tokens.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      tok.kind = TokenKind::number;
      std::string value;
      bool real = false;
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
        if (text[i] == '.') real = true;
        value += text[i];
        advance(text[i]), ++i;
      }
      // exponent form
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
          real = true;
          while (i < j) value += text[i], advance(text[i]), ++i;
          while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            value += text[i];
            advance(text[i]), ++i;
          }
        }
      }
      tok.text = value;
      tok.is_real = real;
      tokens.push_back(std::move(tok));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      tok.kind = TokenKind::keyword_or_ident;
      std::string value;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_')) {
        value += text[i];
        advance(text[i]), ++i;
      }
      tok.text = value;
      tokens.push_back(std::move(tok));
      continue;
    }
    // operators and punctuation
    auto two = i + 1 < text.size() ? text.substr(i, 2) : "";
    tok.kind = TokenKind::op;
    if (two == "||" || two == "<=" || two == ">=" || two == "<>" || two == "!=" ||
        two == "==") {
      tok.text = two;
      advance(text[i]), ++i;
      advance(text[i]), ++i;
    } else if (std::string("()+-*/%,.<>=;").find(c) != std::string::npos) {
      tok.text = std::string(1, c);
      advance(c), ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokenKind::end;
  end.line = line;
  end.column = column;
  tokens.push_back(end);
  return tokens;
}

}  // namespace metaforge::sql
