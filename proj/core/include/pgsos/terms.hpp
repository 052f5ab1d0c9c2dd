#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pgsos/rational.hpp"

namespace pgsos {

enum class VarKind : std::uint8_t { state, distribution };

/// A process variable. State and distribution variables live in disjoint
/// namespaces: `x` as a state variable and `x` as a distribution variable
/// are different variables.
struct Var {
  std::string name;
  VarKind kind = VarKind::state;

  static Var state(std::string name) { return {std::move(name), VarKind::state}; }
  static Var dist(std::string name) { return {std::move(name), VarKind::distribution}; }

  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var&, const Var&) = default;
};

/// Operators with their arities plus the (finite) action alphabet.
class Signature {
 public:
  /// Throws Error(invalid_argument) if the symbol is already declared.
  void add_operator(const std::string& symbol, std::size_t arity);
  void add_action(const std::string& action);

  std::optional<std::size_t> arity(std::string_view symbol) const;
  bool has_operator(std::string_view symbol) const { return arity(symbol).has_value(); }
  bool has_action(std::string_view action) const;

  /// Operators in declaration order.
  const std::vector<std::pair<std::string, std::size_t>>& operators() const { return operators_; }
  /// Actions in declaration order.
  const std::vector<std::string>& actions() const { return actions_; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<std::pair<std::string, std::size_t>> operators_;
  std::vector<std::string> actions_;
};

/// Immutable state term: a variable or an operator applied to state terms.
/// Copies share structure; equality and ordering are structural.
class StateTerm {
 public:
  static StateTerm variable(std::string name);
  static StateTerm apply(std::string symbol, std::vector<StateTerm> args = {});

  bool is_variable() const;
  /// Variable name or operator symbol.
  const std::string& name() const;
  Var var() const;
  const std::vector<StateTerm>& args() const;

  bool is_closed() const;
  std::size_t depth() const;
  std::size_t hash() const;
  std::string to_string() const;

  friend bool operator==(const StateTerm& a, const StateTerm& b);
  friend std::strong_ordering operator<=>(const StateTerm& a, const StateTerm& b);

 private:
  struct Node;
  explicit StateTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct WeightedDistTerm;

/// Immutable distribution term: a distribution variable, an instantiable
/// Dirac `delta(t)`, a convex combination, or an operator lifted to
/// distributions.
class DistTerm {
 public:
  enum class Kind : std::uint8_t { variable, dirac, convex, apply };

  static DistTerm variable(std::string name);
  static DistTerm dirac(StateTerm term);
  /// Weights must lie in (0,1] and sum to exactly 1. Equal summands are merged
  /// and summands are sorted; a single remaining summand is returned as is.
  static DistTerm convex(std::vector<WeightedDistTerm> summands);
  static DistTerm apply(std::string symbol, std::vector<DistTerm> args = {});

  Kind kind() const;
  /// Variable name or operator symbol; empty for dirac/convex.
  const std::string& name() const;
  const StateTerm& dirac_term() const;
  const std::vector<WeightedDistTerm>& summands() const;
  const std::vector<DistTerm>& args() const;

  bool is_closed() const;
  std::size_t hash() const;
  std::string to_string() const;

  friend bool operator==(const DistTerm& a, const DistTerm& b);
  friend std::strong_ordering operator<=>(const DistTerm& a, const DistTerm& b);

 private:
  struct Node;
  explicit DistTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct WeightedDistTerm {
  Rational weight;
  DistTerm term;

  friend bool operator==(const WeightedDistTerm&, const WeightedDistTerm&) = default;
};

/// Either kind of term; used where both are handled uniformly.
using AnyTerm = std::variant<StateTerm, DistTerm>;

std::string to_string(const AnyTerm& term);

/// Finite-support probability distribution over closed state terms.
/// Only positive masses are stored and they sum to exactly 1.
class FiniteDistribution {
 public:
  static FiniteDistribution dirac(StateTerm term);
  /// Drops zero entries; throws Error(invalid_distribution) on negative mass,
  /// open terms, or a total different from 1.
  static FiniteDistribution from_masses(std::map<StateTerm, Rational> masses);

  const std::map<StateTerm, Rational>& masses() const { return masses_; }
  Rational mass(const StateTerm& term) const;
  std::size_t support_size() const { return masses_.size(); }
  bool is_dirac() const { return masses_.size() == 1; }

  /// The same distribution as a convex sum of instantiable Diracs.
  DistTerm to_term() const;
  std::string to_string() const;

  friend bool operator==(const FiniteDistribution&, const FiniteDistribution&) = default;
  friend bool operator<(const FiniteDistribution& a, const FiniteDistribution& b);

 private:
  std::map<StateTerm, Rational> masses_;
};

/// Convex combination sum_i q_i * pi_i.
FiniteDistribution convex_combination(
    const std::vector<std::pair<Rational, FiniteDistribution>>& parts);

/// Lifts operator `symbol` to distributions: the mass of f(t1,..,tn) is the
/// product of the masses of the t_i.
FiniteDistribution lift_operator(const std::string& symbol,
                                 const std::vector<FiniteDistribution>& args);

/// Kind-preserving map from variables to terms.
class Substitution {
 public:
  using Value = std::variant<StateTerm, DistTerm>;

  /// Throws Error(kind_mismatch) when the value's kind differs from the
  /// variable's kind.
  void bind(const Var& var, Value value);

  const StateTerm* state(const std::string& name) const;
  const DistTerm* dist(const std::string& name) const;
  bool empty() const { return states_.empty() && dists_.empty(); }

 private:
  std::map<std::string, StateTerm, std::less<>> states_;
  std::map<std::string, DistTerm, std::less<>> dists_;
};

/// Homomorphic application; unmapped variables are left in place.
StateTerm substitute(const StateTerm& term, const Substitution& sigma);
DistTerm substitute(const DistTerm& term, const Substitution& sigma);

std::set<Var> free_vars(const StateTerm& term);
std::set<Var> free_vars(const DistTerm& term);

/// Bindings of variables to closed values, used to evaluate rule targets
/// without building intermediate terms.
struct Environment {
  std::map<std::string, StateTerm, std::less<>> states;
  std::map<std::string, FiniteDistribution, std::less<>> dists;
};

/// Value of a distribution term whose variables are all bound in `env`.
/// Throws Error(invalid_argument) for an unbound variable.
FiniteDistribution evaluate(const DistTerm& term, const Environment& env);
StateTerm instantiate(const StateTerm& term, const Environment& env);

/// Value of a closed distribution term.
FiniteDistribution eval_closed_dist(const DistTerm& term);

/// Throws Error(undeclared_symbol / arity_mismatch) if a term does not
/// respect the signature.
void check_signature(const StateTerm& term, const Signature& sig);
void check_signature(const DistTerm& term, const Signature& sig);

}  // namespace pgsos

template <>
struct std::hash<pgsos::StateTerm> {
  std::size_t operator()(const pgsos::StateTerm& t) const { return t.hash(); }
};
template <>
struct std::hash<pgsos::DistTerm> {
  std::size_t operator()(const pgsos::DistTerm& t) const { return t.hash(); }
};
