#include "pgsos/lexer.hpp"

#include <cctype>

namespace pgsos {

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::comma: return "','";
    case TokenKind::semicolon: return "';'";
    case TokenKind::colon: return "':'";
    case TokenKind::equals: return "'='";
    case TokenKind::star: return "'*'";
    case TokenKind::plus: return "'+'";
    case TokenKind::backslash: return "'\\'";
    case TokenKind::arrow_open: return "'--'";
    case TokenKind::arrow_close: return "'-->'";
    case TokenKind::neg_open: return "'-/'";
    case TokenKind::neg_close: return "'->'";
    case TokenKind::separator: return "'---'";
    case TokenKind::end: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  SourceLocation loc;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++loc.line;
        loc.column = 1;
      } else {
        ++loc.column;
      }
    }
  };
  auto push = [&](TokenKind kind, std::size_t len) {
    out.push_back({kind, std::string(text.substr(i, len)), loc});
    advance(len);
  };
  auto is_ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };

  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      push(TokenKind::identifier, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      auto digits = [&] {
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      };
      digits();
      if (j + 1 < text.size() && (text[j] == '.' || text[j] == '/') &&
          std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        digits();
      }
      push(TokenKind::number, j - i);
      continue;
    }
    if (c == '-') {
      std::size_t dashes = 0;
      while (i + dashes < text.size() && text[i + dashes] == '-') ++dashes;
      const char after = i + dashes < text.size() ? text[i + dashes] : '\0';
      if (dashes >= 3) {
        push(TokenKind::separator, dashes);
      } else if (dashes == 2 && after == '>') {
        push(TokenKind::arrow_close, 3);
      } else if (dashes == 2) {
        push(TokenKind::arrow_open, 2);
      } else if (after == '/') {
        push(TokenKind::neg_open, 2);
      } else if (after == '>') {
        push(TokenKind::neg_close, 2);
      } else {
        throw ParseError(ErrorKind::syntax_error, loc, "stray '-'");
      }
      continue;
    }
    switch (c) {
      case '(': push(TokenKind::lparen, 1); continue;
      case ')': push(TokenKind::rparen, 1); continue;
      case '{': push(TokenKind::lbrace, 1); continue;
      case '}': push(TokenKind::rbrace, 1); continue;
      case ',': push(TokenKind::comma, 1); continue;
      case ';': push(TokenKind::semicolon, 1); continue;
      case ':': push(TokenKind::colon, 1); continue;
      case '=': push(TokenKind::equals, 1); continue;
      case '*': push(TokenKind::star, 1); continue;
      case '+': push(TokenKind::plus, 1); continue;
      case '\\': push(TokenKind::backslash, 1); continue;
      default:
        throw ParseError(ErrorKind::syntax_error, loc,
                         std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({TokenKind::end, "", loc});
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  const std::size_t k = pos_ + ahead;
  return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::accept(TokenKind kind) {
  if (!at(kind)) return false;
  next();
  return true;
}

Token TokenStream::expect(TokenKind kind, std::string_view what) {
  if (!at(kind)) {
    fail("expected " + std::string(what) + ", found " +
         (peek().kind == TokenKind::end ? std::string("end of input") : "'" + peek().text + "'"));
  }
  return next();
}

void TokenStream::fail(const std::string& message) const {
  throw ParseError(ErrorKind::syntax_error, peek().where, message);
}

void TokenStream::fail(ErrorKind kind, const Token& at, const std::string& message) const {
  throw ParseError(kind, at.where, message);
}

}  // namespace pgsos
