#include "pgsos/term_parser.hpp"

namespace pgsos {

namespace {

constexpr std::string_view kDirac = "delta";

std::size_t checked_arity(TokenStream& in, const TermScope& scope, const Token& head,
                          std::size_t given) {
  const auto arity = scope.sig.arity(head.text);
  if (!arity) in.fail(ErrorKind::undeclared_symbol, head, "undeclared operator '" + head.text + "'");
  if (*arity != given) {
    in.fail(ErrorKind::arity_mismatch, head,
            "operator '" + head.text + "' has arity " + std::to_string(*arity) + ", applied to " +
                std::to_string(given) + " arguments");
  }
  return *arity;
}

Rational parse_weight(TokenStream& in) {
  const Token tok = in.expect(TokenKind::number, "weight");
  const auto value = Rational::parse(tok.text);
  if (!value) in.fail(ErrorKind::syntax_error, tok, "malformed number '" + tok.text + "'");
  return *value;
}

DistTerm parse_dist_primary(TokenStream& in, const TermScope& scope) {
  if (in.accept(TokenKind::lparen)) {
    DistTerm inner = parse_dist_term(in, scope);
    in.expect(TokenKind::rparen, "')'");
    return inner;
  }
  const Token head = in.expect(TokenKind::identifier, "distribution term");
  if (head.text == kDirac) {
    in.expect(TokenKind::lparen, "'(' after delta");
    StateTerm t = parse_state_term(in, scope);
    in.expect(TokenKind::rparen, "')'");
    return DistTerm::dirac(std::move(t));
  }
  if (in.accept(TokenKind::lparen)) {
    std::vector<DistTerm> args;
    if (!in.at(TokenKind::rparen)) {
      do {
        args.push_back(parse_dist_term(in, scope));
      } while (in.accept(TokenKind::comma));
    }
    in.expect(TokenKind::rparen, "')'");
    checked_arity(in, scope, head, args.size());
    return DistTerm::apply(head.text, std::move(args));
  }
  if (scope.sig.has_operator(head.text)) {
    checked_arity(in, scope, head, 0);
    return DistTerm::apply(head.text);
  }
  return DistTerm::variable(head.text);
}

}  // namespace

StateTerm parse_state_term(TokenStream& in, const TermScope& scope) {
  if (in.accept(TokenKind::lparen)) {
    StateTerm inner = parse_state_term(in, scope);
    in.expect(TokenKind::rparen, "')'");
    return inner;
  }
  const Token head = in.expect(TokenKind::identifier, "state term");
  if (head.text == kDirac) in.fail(ErrorKind::syntax_error, head, "delta(...) is not a state term");
  if (in.accept(TokenKind::lparen)) {
    std::vector<StateTerm> args;
    if (!in.at(TokenKind::rparen)) {
      do {
        args.push_back(parse_state_term(in, scope));
      } while (in.accept(TokenKind::comma));
    }
    in.expect(TokenKind::rparen, "')'");
    checked_arity(in, scope, head, args.size());
    return StateTerm::apply(head.text, std::move(args));
  }
  if (scope.sig.has_operator(head.text)) {
    checked_arity(in, scope, head, 0);
    return StateTerm::apply(head.text);
  }
  if (scope.abbreviations) {
    if (const auto it = scope.abbreviations->find(head.text); it != scope.abbreviations->end()) {
      return it->second;
    }
  }
  return StateTerm::variable(head.text);
}

DistTerm parse_dist_term(TokenStream& in, const TermScope& scope) {
  const Token first = in.peek();
  std::vector<WeightedDistTerm> summands;
  bool weighted = false;
  bool unweighted = false;
  do {
    if (in.at(TokenKind::number)) {
      Rational w = parse_weight(in);
      in.expect(TokenKind::star, "'*' after weight");
      summands.push_back({std::move(w), parse_dist_primary(in, scope)});
      weighted = true;
    } else {
      summands.push_back({Rational(1), parse_dist_primary(in, scope)});
      unweighted = true;
    }
  } while (in.accept(TokenKind::plus));
  if (summands.size() == 1 && !weighted) return summands.front().term;
  if (unweighted) {
    in.fail(ErrorKind::syntax_error, first, "every summand of a convex sum needs a weight");
  }
  try {
    return DistTerm::convex(std::move(summands));
  } catch (const Error& e) {
    in.fail(ErrorKind::syntax_error, first, e.what());
  }
}

StateTerm parse_state_term(std::string_view text, const Signature& sig,
                           const Abbreviations* abbreviations) {
  TokenStream in(tokenize(text));
  StateTerm t = parse_state_term(in, TermScope{sig, abbreviations});
  if (!in.at(TokenKind::end)) in.fail("trailing input after term");
  return t;
}

DistTerm parse_dist_term(std::string_view text, const Signature& sig,
                         const Abbreviations* abbreviations) {
  TokenStream in(tokenize(text));
  DistTerm t = parse_dist_term(in, TermScope{sig, abbreviations});
  if (!in.at(TokenKind::end)) in.fail("trailing input after term");
  return t;
}

}  // namespace pgsos
