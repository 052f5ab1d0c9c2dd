#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgsos/error.hpp"
#include "pgsos/term_parser.hpp"
#include "pgsos/terms.hpp"

namespace pgsos {

/// Positive premise `x_arg --action--> derivative`.
struct PositivePremise {
  std::size_t arg = 0;  // zero-based argument position
  std::string action;
  std::string derivative;  // distribution variable name

  friend bool operator==(const PositivePremise&, const PositivePremise&) = default;
};

/// Negative premise `x_arg -/action->`.
struct NegativePremise {
  std::size_t arg = 0;
  std::string action;

  friend bool operator==(const NegativePremise&, const NegativePremise&) = default;
};

/// A validated PGSOS rule
///
///     { x_i --a--> mu }   { x_j -/b-> }
///     ----------------------------------
///        f(x_1, ..., x_n) --c--> target
struct PGSOSRule {
  std::string name;
  std::string op;
  std::vector<std::string> sources;  // state variable names, one per argument
  std::vector<PositivePremise> positive;
  std::vector<NegativePremise> negative;
  std::string action;
  DistTerm target = DistTerm::variable("mu");

  /// Argument positions tested by some premise.
  std::set<std::size_t> tested_args() const;

  friend bool operator==(const PGSOSRule&, const PGSOSRule&) = default;
};

/// A rule as written, before its variables are resolved to positions.
/// Premises name their source by variable; `derivative` is empty for a
/// negative premise.
struct CandidateRule {
  struct Premise {
    std::string source;
    std::string action;
    std::optional<std::string> derivative;
    SourceLocation where;
  };

  std::string name;
  std::string op;
  std::vector<std::string> sources;
  std::vector<Premise> premises;
  std::string action;
  DistTerm target = DistTerm::variable("mu");
  SourceLocation where;
};

enum class RuleViolationKind {
  duplicate_derivative,
  duplicate_source,
  foreign_target_variable,
  premise_on_non_source,
};

std::string_view to_string(RuleViolationKind kind);

struct RuleViolation {
  RuleViolationKind kind;
  std::string detail;
};

/// Checks the three PGSOS well-formedness constraints plus that every
/// premise tests a source variable. Returns all violations (empty = ok).
std::vector<RuleViolation> validate_rule(const CandidateRule& rule);

/// Converts a candidate that passed validate_rule.
PGSOSRule resolve_rule(const CandidateRule& rule);

/// Set expression over actions: atoms combined left to right with `+`
/// (union) and `\` (difference). `ACT` names the whole alphabet.
struct SetExpr {
  struct Atom {
    std::optional<std::string> name;   // named set
    std::vector<std::string> members;  // literal {a, b}
    SourceLocation where;
  };
  std::vector<std::pair<char, Atom>> parts;  // first op is '+'
};

/// A rule, possibly quantified `forall a in S`.
struct RuleTemplate {
  CandidateRule rule;
  std::optional<std::string> action_var;
  SetExpr range;
};

struct NamedSet {
  std::string name;
  std::vector<std::string> actions;  // in declaration order of the alphabet

  friend bool operator==(const NamedSet&, const NamedSet&) = default;
};

struct NamedTerm {
  std::string name;
  StateTerm term;

  friend bool operator==(const NamedTerm&, const NamedTerm&) = default;
};

/// Parse result before template expansion.
struct TemplateDocument {
  Signature sig;
  std::vector<NamedSet> sets;
  std::vector<NamedTerm> terms;
  std::vector<RuleTemplate> templates;
};

/// A PGSOS transition system specification.
class SpecDocument {
 public:
  Signature sig;
  std::vector<NamedSet> sets;
  std::vector<NamedTerm> terms;
  std::vector<PGSOSRule> rules;

  /// Indices into `rules` of the rules whose source operator is `op`.
  std::vector<std::size_t> rules_for(std::string_view op) const;
  Abbreviations abbreviations() const;
  const NamedSet* find_set(std::string_view name) const;

  /// Parses a closed or open state term against this spec's signature and
  /// abbreviations.
  StateTerm parse_term(std::string_view text) const;

  friend bool operator==(const SpecDocument&, const SpecDocument&) = default;
};

struct Diagnostic {
  SourceLocation where;
  std::string message;
};

/// Parses without expanding templates. Throws ParseError.
TemplateDocument parse_templates(std::string_view text);

/// Instantiates every `forall a in S` template once per action of S. An
/// empty S produces no rules and an EmptyExpansion warning.
SpecDocument expand_templates(const TemplateDocument& doc, std::vector<Diagnostic>* warnings = nullptr);

/// Parse, expand and validate. Throws ParseError (syntax_error,
/// undeclared_symbol, arity_mismatch, invalid_rule).
SpecDocument parse_spec(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);

/// Canonical text form; parse_spec(print_spec(d)) == d.
std::string print_spec(const SpecDocument& doc);
std::string print_rule(const PGSOSRule& rule);

/// Reads a whole file; throws Error(invalid_argument) if it cannot be read.
std::string read_file(const std::string& path);

}  // namespace pgsos
