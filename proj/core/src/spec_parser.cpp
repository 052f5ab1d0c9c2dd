#include <algorithm>

#include "pgsos/spec.hpp"
#include "spec_internal.hpp"

namespace pgsos {

namespace {

bool is_keyword(std::string_view word) {
  return word == "actions" || word == "set" || word == "op" || word == "term" || word == "rule" ||
         word == "forall" || word == "in" || word == "ACT" || word == "delta";
}

Token expect_name(TokenStream& in, std::string_view what) {
  Token tok = in.expect(TokenKind::identifier, what);
  if (is_keyword(tok.text)) in.fail(ErrorKind::syntax_error, tok, "'" + tok.text + "' is reserved");
  return tok;
}

// Operators and actions may be used before they are declared, so they are
// collected in a first pass over the token stream.
Signature prescan(const std::vector<Token>& tokens) {
  Signature sig;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    if (tok.kind != TokenKind::identifier) continue;
    // Only statement-initial keywords count: the previous token ends a statement.
    const bool statement_start =
        i == 0 || tokens[i - 1].kind == TokenKind::semicolon || tokens[i - 1].kind == TokenKind::rbrace;
    if (!statement_start) continue;
    if (tok.text == "op" && i + 3 < tokens.size() && tokens[i + 1].kind == TokenKind::identifier &&
        tokens[i + 2].kind == TokenKind::colon && tokens[i + 3].kind == TokenKind::number) {
      const Token& name = tokens[i + 1];
      const auto arity = Rational::parse(tokens[i + 3].text);
      if (!arity || !arity->is_integer() || *arity < Rational(0)) {
        throw ParseError(ErrorKind::syntax_error, tokens[i + 3].where, "arity must be a natural number");
      }
      if (sig.has_operator(name.text)) {
        throw ParseError(ErrorKind::syntax_error, name.where, "operator '" + name.text + "' declared twice");
      }
      sig.add_operator(name.text, static_cast<std::size_t>(arity->get().get_num().get_ui()));
    } else if (tok.text == "actions") {
      for (std::size_t j = i + 1; j < tokens.size() && tokens[j].kind != TokenKind::semicolon; ++j) {
        if (tokens[j].kind != TokenKind::identifier) continue;
        if (sig.has_action(tokens[j].text)) {
          throw ParseError(ErrorKind::syntax_error, tokens[j].where,
                           "action '" + tokens[j].text + "' declared twice");
        }
        sig.add_action(tokens[j].text);
      }
    }
  }
  return sig;
}

SetExpr parse_set_expr(TokenStream& in) {
  SetExpr expr;
  char op = '+';
  while (true) {
    SetExpr::Atom atom;
    atom.where = in.peek().where;
    if (in.accept(TokenKind::lbrace)) {
      if (!in.at(TokenKind::rbrace)) {
        do {
          atom.members.push_back(in.expect(TokenKind::identifier, "action").text);
        } while (in.accept(TokenKind::comma));
      }
      in.expect(TokenKind::rbrace, "'}'");
    } else {
      atom.name = in.expect(TokenKind::identifier, "action set").text;
    }
    expr.parts.emplace_back(op, std::move(atom));
    if (in.accept(TokenKind::plus)) {
      op = '+';
    } else if (in.accept(TokenKind::backslash)) {
      op = '\\';
    } else {
      return expr;
    }
  }
}

void parse_actions(TokenStream& in) {
  // Already recorded by the prescan; only the shape is checked here.
  do {
    expect_name(in, "action name");
  } while (in.accept(TokenKind::comma));
  in.expect(TokenKind::semicolon, "';'");
}

void parse_op(TokenStream& in) {
  expect_name(in, "operator name");
  in.expect(TokenKind::colon, "':'");
  in.expect(TokenKind::number, "arity");
  in.expect(TokenKind::semicolon, "';'");
}

CandidateRule::Premise parse_premise(TokenStream& in) {
  CandidateRule::Premise p;
  const Token src = expect_name(in, "premise source variable");
  p.source = src.text;
  p.where = src.where;
  if (in.accept(TokenKind::arrow_open)) {
    p.action = in.expect(TokenKind::identifier, "action").text;
    in.expect(TokenKind::arrow_close, "'-->'");
    p.derivative = expect_name(in, "derivative variable").text;
  } else if (in.accept(TokenKind::neg_open)) {
    p.action = in.expect(TokenKind::identifier, "action").text;
    in.expect(TokenKind::neg_close, "'->'");
  } else {
    in.fail("expected '--' or '-/' after premise source");
  }
  return p;
}

RuleTemplate parse_rule(TokenStream& in, const Signature& sig, const Abbreviations& abbrev,
                        const SourceLocation& where, std::size_t ordinal) {
  RuleTemplate t;
  t.rule.where = where;
  if (in.at(TokenKind::identifier) && !in.at_keyword("forall")) {
    t.rule.name = expect_name(in, "rule name").text;
  }
  if (in.at_keyword("forall")) {
    in.next();
    t.action_var = expect_name(in, "action variable").text;
    if (!in.at_keyword("in")) in.fail("expected 'in'");
    in.next();
    t.range = parse_set_expr(in);
  }
  in.expect(TokenKind::lbrace, "'{'");

  while (!in.at(TokenKind::separator)) {
    t.rule.premises.push_back(parse_premise(in));
    if (!in.accept(TokenKind::comma)) in.accept(TokenKind::semicolon);
  }
  in.expect(TokenKind::separator, "'---'");

  const Token head = in.expect(TokenKind::identifier, "operator");
  const auto arity = sig.arity(head.text);
  if (!arity) in.fail(ErrorKind::undeclared_symbol, head, "undeclared operator '" + head.text + "'");
  t.rule.op = head.text;
  if (in.accept(TokenKind::lparen)) {
    if (!in.at(TokenKind::rparen)) {
      do {
        t.rule.sources.push_back(expect_name(in, "source variable").text);
      } while (in.accept(TokenKind::comma));
    }
    in.expect(TokenKind::rparen, "')'");
  }
  if (t.rule.sources.size() != *arity) {
    in.fail(ErrorKind::arity_mismatch, head,
            "operator '" + head.text + "' has arity " + std::to_string(*arity) + ", rule source has " +
                std::to_string(t.rule.sources.size()) + " arguments");
  }
  in.expect(TokenKind::arrow_open, "'--'");
  t.rule.action = in.expect(TokenKind::identifier, "action").text;
  in.expect(TokenKind::arrow_close, "'-->'");
  t.rule.target = parse_dist_term(in, TermScope{sig, &abbrev});
  in.accept(TokenKind::semicolon);
  in.expect(TokenKind::rbrace, "'}'");

  if (t.rule.name.empty()) t.rule.name = t.rule.op + "_" + std::to_string(ordinal);
  return t;
}

}  // namespace

TemplateDocument parse_templates(std::string_view text) {
  auto tokens = tokenize(text);
  TemplateDocument doc;
  doc.sig = prescan(tokens);
  TokenStream in(std::move(tokens));
  Abbreviations abbrev;
  std::size_t ordinal = 0;

  while (!in.at(TokenKind::end)) {
    const Token kw = in.expect(TokenKind::identifier, "declaration");
    if (kw.text == "actions") {
      parse_actions(in);
    } else if (kw.text == "op") {
      parse_op(in);
    } else if (kw.text == "set") {
      const Token name = expect_name(in, "set name");
      if (std::any_of(doc.sets.begin(), doc.sets.end(),
                      [&](const NamedSet& s) { return s.name == name.text; })) {
        in.fail(ErrorKind::syntax_error, name, "set '" + name.text + "' declared twice");
      }
      in.expect(TokenKind::equals, "'='");
      const SetExpr expr = parse_set_expr(in);
      in.expect(TokenKind::semicolon, "';'");
      doc.sets.push_back({name.text, detail::evaluate_set(expr, doc.sig, doc.sets)});
    } else if (kw.text == "term") {
      const Token name = expect_name(in, "term name");
      if (doc.sig.has_operator(name.text) || abbrev.count(name.text)) {
        in.fail(ErrorKind::syntax_error, name, "name '" + name.text + "' already in use");
      }
      in.expect(TokenKind::equals, "'='");
      StateTerm term = parse_state_term(in, TermScope{doc.sig, &abbrev});
      in.expect(TokenKind::semicolon, "';'");
      abbrev.emplace(name.text, term);
      doc.terms.push_back({name.text, std::move(term)});
    } else if (kw.text == "rule") {
      doc.templates.push_back(parse_rule(in, doc.sig, abbrev, kw.where, ordinal++));
    } else {
      in.fail(ErrorKind::syntax_error, kw, "unknown declaration '" + kw.text + "'");
    }
  }
  return doc;
}

SpecDocument parse_spec(std::string_view text, std::vector<Diagnostic>* warnings) {
  return expand_templates(parse_templates(text), warnings);
}

}  // namespace pgsos
