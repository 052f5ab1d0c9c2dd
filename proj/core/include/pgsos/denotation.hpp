#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pgsos/multiplicity.hpp"
#include "pgsos/spec.hpp"
#include "pgsos/terms.hpp"

namespace pgsos {

struct FixpointConfig {
  /// Rounds allowed per strongly connected group of mutually dependent entries.
  std::size_t max_iterations = 64;
  /// A variable is widened to infinity once its weighted sup has grown in at
  /// least half of the last `widening_window` rounds (and never shrunk).
  std::size_t widening_window = 8;
  /// Counts tested arguments of operators applied to distribution terms as
  /// one copy. Turning this off reproduces the unsound denotations the
  /// correction exists for; only useful for regression tests.
  bool reactive_testing_correction = true;
};

/// The state variables x1..xn standing for the arguments of an n-ary
/// operator in rule and operator denotations.
std::vector<Var> argument_vars(std::size_t arity);
/// f(x1, ..., xn).
StateTerm operator_term(const std::string& op, std::size_t arity);

/// Denotations of the tracked terms and of every rule.
struct DenotationState {
  std::map<AnyTerm, GenSet> terms;
  std::vector<GenSet> rules;  // parallel to the spec's rules

  /// Throws Error(untracked_subterm).
  const GenSet& term(const AnyTerm& t) const;
};

/// Computes denotations for one spec. Rules are used with their source
/// variables renamed to x1..xn by position.
class DenotationEngine {
 public:
  explicit DenotationEngine(const SpecDocument& doc, FixpointConfig config = {});

  const SpecDocument& spec() const { return doc_; }
  const FixpointConfig& config() const { return config_; }
  /// The rules with positional source variables, parallel to spec().rules.
  const std::vector<PGSOSRule>& rules() const { return rules_; }

  /// Queries, their subterms, every rule target with its subterms and
  /// f(x1..xn) for every operator, in a fixed order.
  std::vector<AnyTerm> tracked_terms(const std::vector<AnyTerm>& queries) const;
  /// Every tracked term and rule at {delta_0}.
  DenotationState bottom(const std::vector<AnyTerm>& tracked) const;

  /// Rule clause: p (+) sum over positive premises of p .mu 1_{x_i}, for each
  /// generator p of the target's denotation.
  GenSet denote_rule_step(const DenotationState& state, std::size_t rule) const;
  /// Term clauses. `inexact` is set when an upper bound replaced a least
  /// upper bound.
  GenSet denote_term_step(const DenotationState& state, const AnyTerm& t, bool* inexact = nullptr) const;
  /// One simultaneous application of every clause.
  DenotationState apply_functor(const DenotationState& state) const;

  /// Entries a term's clause reads: (tracked terms, rule indices).
  std::pair<std::vector<AnyTerm>, std::vector<std::size_t>> term_dependencies(const AnyTerm& t) const;

 private:
  const SpecDocument& doc_;
  FixpointConfig config_;
  std::vector<PGSOSRule> rules_;
};

struct DenotationResult {
  DenotationState state;
  std::size_t rounds = 0;
  /// Entries where widening set some variable to infinity.
  std::set<AnyTerm> widened_terms;
  std::set<std::size_t> widened_rules;
  /// Entries whose own clause used an over-approximating sup.
  std::set<AnyTerm> inexact_terms;

  const GenSet& denotation(const AnyTerm& t) const { return state.term(t); }
  /// True if `t`'s denotation depends (transitively) on a widened entry.
  bool widened(const AnyTerm& t) const;
  /// True if `t`'s denotation depends on an over-approximating sup.
  bool over_approximated(const AnyTerm& t) const;
  bool any_widened() const { return !widened_terms.empty() || !widened_rules.empty(); }

  std::map<AnyTerm, std::set<AnyTerm>> term_reach;  // terms each term depends on (incl. itself)
  std::map<AnyTerm, std::set<std::size_t>> rule_reach;
};

/// Least fixed point of the denotation functional on the tracked terms.
/// Throws Error(iteration_limit_exceeded) if some group of entries is still
/// growing after max_iterations rounds despite widening, and
/// Error(undeclared_symbol / arity_mismatch) for queries outside the
/// signature.
DenotationResult lfp_denotations(const DenotationEngine& engine, const std::vector<AnyTerm>& queries);
DenotationResult lfp_denotations(const SpecDocument& doc, const std::vector<AnyTerm>& queries,
                                 const FixpointConfig& config = {});

/// da([[t]], e): an upper bound on d(s1(t), s2(t)) for all closed
/// substitutions whose per-variable distances are below e.
Rational bound_distance(const DenotationResult& result, const StateTerm& t, const ProcessDistance& e);
Rational bound_distance(const SpecDocument& doc, const StateTerm& t, const ProcessDistance& e,
                        const FixpointConfig& config = {});

}  // namespace pgsos
