#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pgsos/error.hpp"

namespace pgsos {

enum class TokenKind {
  identifier,
  number,
  lparen,
  rparen,
  lbrace,
  rbrace,
  comma,
  semicolon,
  colon,
  equals,
  star,
  plus,
  backslash,
  arrow_open,     // --
  arrow_close,    // -->
  neg_open,       // -/
  neg_close,      // ->
  separator,      // --- (three or more dashes)
  end,
};

std::string_view describe(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  SourceLocation where;
};

/// Splits spec or term text into tokens. `#` and `//` start line comments.
/// Throws ParseError(syntax_error) on characters outside the grammar.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the small helpers every recursive-descent
/// routine here needs.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  bool at(TokenKind kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
  bool at_keyword(std::string_view word) const {
    return at(TokenKind::identifier) && peek().text == word;
  }
  Token next();
  bool accept(TokenKind kind);
  Token expect(TokenKind kind, std::string_view what);
  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail(ErrorKind kind, const Token& at, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace pgsos
