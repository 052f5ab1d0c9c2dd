#include "pgsos/terms.hpp"

#include <algorithm>
#include <sstream>

#include "pgsos/error.hpp"

namespace pgsos {

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::strong_ordering compare_strings(const std::string& a, const std::string& b) {
  const int c = a.compare(b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace

// ---------------------------------------------------------------- Signature

void Signature::add_operator(const std::string& symbol, std::size_t arity) {
  if (has_operator(symbol)) {
    throw Error(ErrorKind::invalid_argument, "operator '" + symbol + "' declared twice");
  }
  operators_.emplace_back(symbol, arity);
}

void Signature::add_action(const std::string& action) {
  if (!has_action(action)) actions_.push_back(action);
}

std::optional<std::size_t> Signature::arity(std::string_view symbol) const {
  for (const auto& [name, n] : operators_) {
    if (name == symbol) return n;
  }
  return std::nullopt;
}

bool Signature::has_action(std::string_view action) const {
  return std::find(actions_.begin(), actions_.end(), action) != actions_.end();
}

// ---------------------------------------------------------------- StateTerm

struct StateTerm::Node {
  bool variable = false;
  std::string name;
  std::vector<StateTerm> args;
  std::size_t hash = 0;
  std::size_t depth = 0;
  bool closed = true;
};

StateTerm StateTerm::variable(std::string name) {
  auto node = std::make_shared<Node>();
  node->variable = true;
  node->hash = mix(0x51ed27, std::hash<std::string>{}(name));
  node->name = std::move(name);
  node->closed = false;
  return StateTerm(std::move(node));
}

StateTerm StateTerm::apply(std::string symbol, std::vector<StateTerm> args) {
  auto node = std::make_shared<Node>();
  std::size_t h = mix(0xa99, std::hash<std::string>{}(symbol));
  std::size_t depth = 0;
  bool closed = true;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    depth = std::max(depth, a.depth());
    closed = closed && a.is_closed();
  }
  node->name = std::move(symbol);
  node->args = std::move(args);
  node->hash = h;
  node->depth = depth + 1;
  node->closed = closed;
  return StateTerm(std::move(node));
}

bool StateTerm::is_variable() const { return node_->variable; }
const std::string& StateTerm::name() const { return node_->name; }
Var StateTerm::var() const { return Var::state(node_->name); }
const std::vector<StateTerm>& StateTerm::args() const { return node_->args; }
bool StateTerm::is_closed() const { return node_->closed; }
std::size_t StateTerm::depth() const { return node_->depth; }
std::size_t StateTerm::hash() const { return node_->hash; }

std::string StateTerm::to_string() const {
  if (is_variable() || args().empty()) return name();
  std::string out = name() + "(";
  for (std::size_t i = 0; i < args().size(); ++i) {
    if (i) out += ", ";
    out += args()[i].to_string();
  }
  return out + ")";
}

bool operator==(const StateTerm& a, const StateTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.is_variable() != b.is_variable() || a.name() != b.name()) {
    return false;
  }
  return a.args() == b.args();
}

std::strong_ordering operator<=>(const StateTerm& a, const StateTerm& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  // Variables sort before applications; then by symbol, arity, arguments.
  if (a.is_variable() != b.is_variable()) {
    return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (auto c = compare_strings(a.name(), b.name()); c != 0) return c;
  if (auto c = a.args().size() <=> b.args().size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (auto c = a.args()[i] <=> b.args()[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------- DistTerm

struct DistTerm::Node {
  Kind kind = Kind::variable;
  std::string name;
  std::optional<StateTerm> dirac;
  std::vector<WeightedDistTerm> summands;
  std::vector<DistTerm> args;
  std::size_t hash = 0;
  bool closed = true;
};

DistTerm DistTerm::variable(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::variable;
  node->hash = mix(0x3u, std::hash<std::string>{}(name));
  node->name = std::move(name);
  node->closed = false;
  return DistTerm(std::move(node));
}

DistTerm DistTerm::dirac(StateTerm term) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::dirac;
  node->hash = mix(0x5u, term.hash());
  node->closed = term.is_closed();
  node->dirac = std::move(term);
  return DistTerm(std::move(node));
}

DistTerm DistTerm::convex(std::vector<WeightedDistTerm> summands) {
  if (summands.empty()) {
    throw Error(ErrorKind::invalid_distribution, "convex sum without summands");
  }
  Rational total;
  for (const auto& s : summands) {
    if (s.weight <= Rational(0) || s.weight > Rational(1)) {
      throw Error(ErrorKind::invalid_distribution,
                  "convex weight " + s.weight.to_string() + " outside (0,1]");
    }
    total += s.weight;
  }
  if (total != Rational(1)) {
    throw Error(ErrorKind::invalid_distribution,
                "convex weights sum to " + total.to_string() + ", expected 1");
  }
  std::sort(summands.begin(), summands.end(),
            [](const auto& a, const auto& b) { return a.term < b.term; });
  std::vector<WeightedDistTerm> merged;
  for (auto& s : summands) {
    if (!merged.empty() && merged.back().term == s.term) {
      merged.back().weight += s.weight;
    } else {
      merged.push_back(std::move(s));
    }
  }
  if (merged.size() == 1) return merged.front().term;

  auto node = std::make_shared<Node>();
  node->kind = Kind::convex;
  std::size_t h = 0x7u;
  bool closed = true;
  for (const auto& s : merged) {
    h = mix(mix(h, s.weight.hash()), s.term.hash());
    closed = closed && s.term.is_closed();
  }
  node->hash = h;
  node->closed = closed;
  node->summands = std::move(merged);
  return DistTerm(std::move(node));
}

DistTerm DistTerm::apply(std::string symbol, std::vector<DistTerm> args) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::apply;
  std::size_t h = mix(0xbu, std::hash<std::string>{}(symbol));
  bool closed = true;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    closed = closed && a.is_closed();
  }
  node->name = std::move(symbol);
  node->args = std::move(args);
  node->hash = h;
  node->closed = closed;
  return DistTerm(std::move(node));
}

DistTerm::Kind DistTerm::kind() const { return node_->kind; }
const std::string& DistTerm::name() const { return node_->name; }
const StateTerm& DistTerm::dirac_term() const { return *node_->dirac; }
const std::vector<WeightedDistTerm>& DistTerm::summands() const { return node_->summands; }
const std::vector<DistTerm>& DistTerm::args() const { return node_->args; }
bool DistTerm::is_closed() const { return node_->closed; }
std::size_t DistTerm::hash() const { return node_->hash; }

std::string DistTerm::to_string() const {
  switch (kind()) {
    case Kind::variable:
      return name();
    case Kind::dirac:
      return "delta(" + dirac_term().to_string() + ")";
    case Kind::convex: {
      std::string out;
      for (std::size_t i = 0; i < summands().size(); ++i) {
        const auto& s = summands()[i];
        if (i) out += " + ";
        const bool nested = s.term.kind() == Kind::convex;
        out += s.weight.to_string() + "*" + (nested ? "(" : "") + s.term.to_string() +
               (nested ? ")" : "");
      }
      return out;
    }
    case Kind::apply: {
      if (args().empty()) return name();
      std::string out = name() + "(";
      for (std::size_t i = 0; i < args().size(); ++i) {
        if (i) out += ", ";
        out += args()[i].to_string();
      }
      return out + ")";
    }
  }
  return {};
}

bool operator==(const DistTerm& a, const DistTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case DistTerm::Kind::variable:
      return a.name() == b.name();
    case DistTerm::Kind::dirac:
      return a.dirac_term() == b.dirac_term();
    case DistTerm::Kind::convex:
      return a.summands() == b.summands();
    case DistTerm::Kind::apply:
      return a.name() == b.name() && a.args() == b.args();
  }
  return false;
}

std::strong_ordering operator<=>(const DistTerm& a, const DistTerm& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case DistTerm::Kind::variable:
      return compare_strings(a.name(), b.name());
    case DistTerm::Kind::dirac:
      return a.dirac_term() <=> b.dirac_term();
    case DistTerm::Kind::convex: {
      const auto& x = a.summands();
      const auto& y = b.summands();
      if (auto c = x.size() <=> y.size(); c != 0) return c;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (auto c = x[i].term <=> y[i].term; c != 0) return c;
        if (auto c = x[i].weight <=> y[i].weight; c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
    case DistTerm::Kind::apply: {
      if (auto c = compare_strings(a.name(), b.name()); c != 0) return c;
      if (auto c = a.args().size() <=> b.args().size(); c != 0) return c;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (auto c = a.args()[i] <=> b.args()[i]; c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

std::string to_string(const AnyTerm& term) {
  return std::visit([](const auto& t) { return t.to_string(); }, term);
}

// ------------------------------------------------------- FiniteDistribution

FiniteDistribution FiniteDistribution::dirac(StateTerm term) {
  if (!term.is_closed()) {
    throw Error(ErrorKind::invalid_distribution, "distribution over open term " + term.to_string());
  }
  FiniteDistribution d;
  d.masses_.emplace(std::move(term), Rational(1));
  return d;
}

FiniteDistribution FiniteDistribution::from_masses(std::map<StateTerm, Rational> masses) {
  FiniteDistribution d;
  Rational total;
  for (auto& [term, p] : masses) {
    if (p < Rational(0)) {
      throw Error(ErrorKind::invalid_distribution, "negative mass on " + term.to_string());
    }
    if (!term.is_closed()) {
      throw Error(ErrorKind::invalid_distribution, "distribution over open term " + term.to_string());
    }
    if (p.is_zero()) continue;
    total += p;
    d.masses_.emplace(term, p);
  }
  if (total != Rational(1)) {
    throw Error(ErrorKind::invalid_distribution, "masses sum to " + total.to_string());
  }
  return d;
}

Rational FiniteDistribution::mass(const StateTerm& term) const {
  const auto it = masses_.find(term);
  return it == masses_.end() ? Rational(0) : it->second;
}

DistTerm FiniteDistribution::to_term() const {
  std::vector<WeightedDistTerm> parts;
  parts.reserve(masses_.size());
  for (const auto& [t, p] : masses_) parts.push_back({p, DistTerm::dirac(t)});
  return DistTerm::convex(std::move(parts));
}

std::string FiniteDistribution::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [t, p] : masses_) {
    if (!first) out += ", ";
    first = false;
    out += t.to_string() + " : " + p.to_string();
  }
  return out + "}";
}

bool operator<(const FiniteDistribution& a, const FiniteDistribution& b) {
  return std::lexicographical_compare(
      a.masses_.begin(), a.masses_.end(), b.masses_.begin(), b.masses_.end(),
      [](const auto& x, const auto& y) {
        if (auto c = x.first <=> y.first; c != 0) return c < 0;
        return x.second < y.second;
      });
}

FiniteDistribution convex_combination(
    const std::vector<std::pair<Rational, FiniteDistribution>>& parts) {
  std::map<StateTerm, Rational> masses;
  for (const auto& [q, pi] : parts) {
    for (const auto& [t, p] : pi.masses()) masses[t] += q * p;
  }
  return FiniteDistribution::from_masses(std::move(masses));
}

FiniteDistribution lift_operator(const std::string& symbol,
                                 const std::vector<FiniteDistribution>& args) {
  // Enumerate the product of supports with an odometer.
  std::vector<std::vector<std::pair<StateTerm, Rational>>> supports;
  supports.reserve(args.size());
  for (const auto& a : args) supports.emplace_back(a.masses().begin(), a.masses().end());

  std::map<StateTerm, Rational> masses;
  std::vector<std::size_t> pos(args.size(), 0);
  while (true) {
    std::vector<StateTerm> children;
    children.reserve(args.size());
    Rational p(1);
    for (std::size_t i = 0; i < args.size(); ++i) {
      children.push_back(supports[i][pos[i]].first);
      p *= supports[i][pos[i]].second;
    }
    masses[StateTerm::apply(symbol, std::move(children))] += p;

    std::size_t i = 0;
    for (; i < args.size(); ++i) {
      if (++pos[i] < supports[i].size()) break;
      pos[i] = 0;
    }
    if (i == args.size()) break;
  }
  return FiniteDistribution::from_masses(std::move(masses));
}

// -------------------------------------------------------------- Substitution

void Substitution::bind(const Var& var, Value value) {
  const bool is_state_value = std::holds_alternative<StateTerm>(value);
  if (is_state_value != (var.kind == VarKind::state)) {
    throw Error(ErrorKind::kind_mismatch,
                "variable '" + var.name + "' bound to a term of the other kind");
  }
  if (is_state_value) {
    states_.insert_or_assign(var.name, std::get<StateTerm>(std::move(value)));
  } else {
    dists_.insert_or_assign(var.name, std::get<DistTerm>(std::move(value)));
  }
}

const StateTerm* Substitution::state(const std::string& name) const {
  const auto it = states_.find(name);
  return it == states_.end() ? nullptr : &it->second;
}

const DistTerm* Substitution::dist(const std::string& name) const {
  const auto it = dists_.find(name);
  return it == dists_.end() ? nullptr : &it->second;
}

StateTerm substitute(const StateTerm& term, const Substitution& sigma) {
  if (term.is_variable()) {
    const auto* bound = sigma.state(term.name());
    return bound ? *bound : term;
  }
  if (term.is_closed()) return term;
  std::vector<StateTerm> args;
  args.reserve(term.args().size());
  for (const auto& a : term.args()) args.push_back(substitute(a, sigma));
  return StateTerm::apply(term.name(), std::move(args));
}

DistTerm substitute(const DistTerm& term, const Substitution& sigma) {
  if (term.is_closed()) return term;
  switch (term.kind()) {
    case DistTerm::Kind::variable: {
      const auto* bound = sigma.dist(term.name());
      return bound ? *bound : term;
    }
    case DistTerm::Kind::dirac:
      return DistTerm::dirac(substitute(term.dirac_term(), sigma));
    case DistTerm::Kind::convex: {
      std::vector<WeightedDistTerm> parts;
      for (const auto& s : term.summands()) parts.push_back({s.weight, substitute(s.term, sigma)});
      return DistTerm::convex(std::move(parts));
    }
    case DistTerm::Kind::apply: {
      std::vector<DistTerm> args;
      for (const auto& a : term.args()) args.push_back(substitute(a, sigma));
      return DistTerm::apply(term.name(), std::move(args));
    }
  }
  return term;
}

namespace {

void collect_vars(const StateTerm& term, std::set<Var>& out) {
  if (term.is_closed()) return;
  if (term.is_variable()) {
    out.insert(term.var());
    return;
  }
  for (const auto& a : term.args()) collect_vars(a, out);
}

void collect_vars(const DistTerm& term, std::set<Var>& out) {
  if (term.is_closed()) return;
  switch (term.kind()) {
    case DistTerm::Kind::variable:
      out.insert(Var::dist(term.name()));
      break;
    case DistTerm::Kind::dirac:
      collect_vars(term.dirac_term(), out);
      break;
    case DistTerm::Kind::convex:
      for (const auto& s : term.summands()) collect_vars(s.term, out);
      break;
    case DistTerm::Kind::apply:
      for (const auto& a : term.args()) collect_vars(a, out);
      break;
  }
}

}  // namespace

std::set<Var> free_vars(const StateTerm& term) {
  std::set<Var> out;
  collect_vars(term, out);
  return out;
}

std::set<Var> free_vars(const DistTerm& term) {
  std::set<Var> out;
  collect_vars(term, out);
  return out;
}

StateTerm instantiate(const StateTerm& term, const Environment& env) {
  if (term.is_closed()) return term;
  if (term.is_variable()) {
    const auto it = env.states.find(term.name());
    if (it == env.states.end()) {
      throw Error(ErrorKind::invalid_argument, "unbound state variable '" + term.name() + "'");
    }
    return it->second;
  }
  std::vector<StateTerm> args;
  args.reserve(term.args().size());
  for (const auto& a : term.args()) args.push_back(instantiate(a, env));
  return StateTerm::apply(term.name(), std::move(args));
}

FiniteDistribution evaluate(const DistTerm& term, const Environment& env) {
  switch (term.kind()) {
    case DistTerm::Kind::variable: {
      const auto it = env.dists.find(term.name());
      if (it == env.dists.end()) {
        throw Error(ErrorKind::invalid_argument,
                    "unbound distribution variable '" + term.name() + "'");
      }
      return it->second;
    }
    case DistTerm::Kind::dirac:
      return FiniteDistribution::dirac(instantiate(term.dirac_term(), env));
    case DistTerm::Kind::convex: {
      std::vector<std::pair<Rational, FiniteDistribution>> parts;
      parts.reserve(term.summands().size());
      for (const auto& s : term.summands()) parts.emplace_back(s.weight, evaluate(s.term, env));
      return convex_combination(parts);
    }
    case DistTerm::Kind::apply: {
      std::vector<FiniteDistribution> args;
      args.reserve(term.args().size());
      for (const auto& a : term.args()) args.push_back(evaluate(a, env));
      return lift_operator(term.name(), args);
    }
  }
  throw Error(ErrorKind::invalid_argument, "malformed distribution term");
}

FiniteDistribution eval_closed_dist(const DistTerm& term) {
  if (!term.is_closed()) {
    throw Error(ErrorKind::invalid_argument, "term " + term.to_string() + " is not closed");
  }
  return evaluate(term, Environment{});
}

void check_signature(const StateTerm& term, const Signature& sig) {
  if (term.is_variable()) return;
  const auto arity = sig.arity(term.name());
  if (!arity) throw Error(ErrorKind::undeclared_symbol, "undeclared operator '" + term.name() + "'");
  if (*arity != term.args().size()) {
    throw Error(ErrorKind::arity_mismatch, "operator '" + term.name() + "' expects " +
                                               std::to_string(*arity) + " arguments");
  }
  for (const auto& a : term.args()) check_signature(a, sig);
}

void check_signature(const DistTerm& term, const Signature& sig) {
  switch (term.kind()) {
    case DistTerm::Kind::variable:
      return;
    case DistTerm::Kind::dirac:
      check_signature(term.dirac_term(), sig);
      return;
    case DistTerm::Kind::convex:
      for (const auto& s : term.summands()) check_signature(s.term, sig);
      return;
    case DistTerm::Kind::apply: {
      const auto arity = sig.arity(term.name());
      if (!arity) {
        throw Error(ErrorKind::undeclared_symbol, "undeclared operator '" + term.name() + "'");
      }
      if (*arity != term.args().size()) {
        throw Error(ErrorKind::arity_mismatch, "operator '" + term.name() + "' expects " +
                                                   std::to_string(*arity) + " arguments");
      }
      for (const auto& a : term.args()) check_signature(a, sig);
      return;
    }
  }
}

}  // namespace pgsos
