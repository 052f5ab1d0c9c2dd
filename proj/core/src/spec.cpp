#include "pgsos/spec.hpp"

#include "spec_internal.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pgsos {

std::set<std::size_t> PGSOSRule::tested_args() const {
  std::set<std::size_t> out;
  for (const auto& p : positive) out.insert(p.arg);
  for (const auto& n : negative) out.insert(n.arg);
  return out;
}

std::string_view to_string(RuleViolationKind kind) {
  switch (kind) {
    case RuleViolationKind::duplicate_derivative: return "DuplicateDerivative";
    case RuleViolationKind::duplicate_source: return "DuplicateSource";
    case RuleViolationKind::foreign_target_variable: return "ForeignTargetVariable";
    case RuleViolationKind::premise_on_non_source: return "PremiseOnNonSource";
  }
  return "?";
}

std::vector<RuleViolation> validate_rule(const CandidateRule& rule) {
  std::vector<RuleViolation> out;

  std::set<std::string> derivatives;
  for (const auto& p : rule.premises) {
    if (!p.derivative) continue;
    if (!derivatives.insert(*p.derivative).second) {
      out.push_back({RuleViolationKind::duplicate_derivative,
                     "derivative '" + *p.derivative + "' bound by more than one premise"});
    }
  }

  std::set<std::string> sources;
  for (const auto& x : rule.sources) {
    if (!sources.insert(x).second) {
      out.push_back({RuleViolationKind::duplicate_source, "source variable '" + x + "' repeated"});
    }
  }

  for (const auto& p : rule.premises) {
    if (!sources.count(p.source)) {
      out.push_back({RuleViolationKind::premise_on_non_source,
                     "premise tests '" + p.source + "', which is not a source variable"});
    }
  }

  for (const auto& v : free_vars(rule.target)) {
    const bool allowed =
        v.kind == VarKind::state ? sources.count(v.name) > 0 : derivatives.count(v.name) > 0;
    if (!allowed) {
      out.push_back({RuleViolationKind::foreign_target_variable,
                     std::string(v.kind == VarKind::state ? "state" : "distribution") +
                         " variable '" + v.name + "' in target is neither a source nor a derivative"});
    }
  }
  return out;
}

PGSOSRule resolve_rule(const CandidateRule& rule) {
  PGSOSRule out;
  out.name = rule.name;
  out.op = rule.op;
  out.sources = rule.sources;
  out.action = rule.action;
  out.target = rule.target;
  for (const auto& p : rule.premises) {
    const auto it = std::find(rule.sources.begin(), rule.sources.end(), p.source);
    const auto arg = static_cast<std::size_t>(it - rule.sources.begin());
    if (p.derivative) {
      out.positive.push_back({arg, p.action, *p.derivative});
    } else {
      out.negative.push_back({arg, p.action});
    }
  }
  return out;
}

namespace detail {

std::vector<std::string> evaluate_set(const SetExpr& expr, const Signature& sig,
                                      const std::vector<NamedSet>& sets) {
  std::set<std::string> acc;
  for (const auto& [op, atom] : expr.parts) {
    std::set<std::string> members;
    if (atom.name) {
      if (*atom.name == "ACT") {
        members.insert(sig.actions().begin(), sig.actions().end());
      } else {
        const auto it = std::find_if(sets.begin(), sets.end(),
                                     [&](const NamedSet& s) { return s.name == *atom.name; });
        if (it == sets.end()) {
          throw ParseError(ErrorKind::undeclared_symbol, atom.where,
                           "undeclared action set '" + *atom.name + "'");
        }
        members.insert(it->actions.begin(), it->actions.end());
      }
    } else {
      for (const auto& a : atom.members) {
        if (!sig.has_action(a)) {
          throw ParseError(ErrorKind::undeclared_symbol, atom.where, "undeclared action '" + a + "'");
        }
        members.insert(a);
      }
    }
    if (op == '+') {
      acc.insert(members.begin(), members.end());
    } else {
      for (const auto& a : members) acc.erase(a);
    }
  }
  std::vector<std::string> ordered;
  for (const auto& a : sig.actions()) {
    if (acc.count(a)) ordered.push_back(a);
  }
  return ordered;
}

}  // namespace detail

namespace {

CandidateRule instantiate_action(const CandidateRule& rule, const std::string& var,
                                 const std::string& action) {
  CandidateRule out = rule;
  out.name = rule.name + "_" + action;
  if (out.action == var) out.action = action;
  for (auto& p : out.premises) {
    if (p.action == var) p.action = action;
  }
  return out;
}

void check_actions(const CandidateRule& rule, const Signature& sig) {
  if (!sig.has_action(rule.action)) {
    throw ParseError(ErrorKind::undeclared_symbol, rule.where,
                     "undeclared action '" + rule.action + "' in rule " + rule.name);
  }
  for (const auto& p : rule.premises) {
    if (!sig.has_action(p.action)) {
      throw ParseError(ErrorKind::undeclared_symbol, p.where, "undeclared action '" + p.action + "'");
    }
  }
}

}  // namespace


SpecDocument expand_templates(const TemplateDocument& doc, std::vector<Diagnostic>* warnings) {
  SpecDocument out;
  out.sig = doc.sig;
  out.sets = doc.sets;
  out.terms = doc.terms;

  auto add = [&](const CandidateRule& c) {
    check_actions(c, out.sig);
    const auto violations = validate_rule(c);
    if (!violations.empty()) {
      std::string msg = "rule " + c.name + ":";
      for (const auto& v : violations) {
        msg += " " + std::string(to_string(v.kind)) + " (" + v.detail + ");";
      }
      throw ParseError(ErrorKind::invalid_rule, c.where, msg);
    }
    out.rules.push_back(resolve_rule(c));
  };

  for (const auto& t : doc.templates) {
    if (!t.action_var) {
      add(t.rule);
      continue;
    }
    const auto actions = detail::evaluate_set(t.range, out.sig, out.sets);
    if (actions.empty() && warnings) {
      warnings->push_back({t.rule.where, "EmptyExpansion: template " + t.rule.name +
                                             " ranges over an empty action set"});
    }
    for (const auto& a : actions) add(instantiate_action(t.rule, *t.action_var, a));
  }
  return out;
}

std::vector<std::size_t> SpecDocument::rules_for(std::string_view op) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].op == op) out.push_back(i);
  }
  return out;
}

Abbreviations SpecDocument::abbreviations() const {
  Abbreviations out;
  for (const auto& t : terms) out.insert_or_assign(t.name, t.term);
  return out;
}

const NamedSet* SpecDocument::find_set(std::string_view name) const {
  for (const auto& s : sets) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

StateTerm SpecDocument::parse_term(std::string_view text) const {
  const auto abbrev = abbreviations();
  return parse_state_term(text, sig, &abbrev);
}

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::string print_rule(const PGSOSRule& rule) {
  std::ostringstream out;
  out << "rule " << rule.name << " {\n";
  for (const auto& p : rule.positive) {
    out << "  " << rule.sources[p.arg] << " --" << p.action << "--> " << p.derivative << "\n";
  }
  for (const auto& n : rule.negative) {
    out << "  " << rule.sources[n.arg] << " -/" << n.action << "->\n";
  }
  out << "  ---\n  " << rule.op;
  if (!rule.sources.empty()) out << "(" << join(rule.sources, ", ") << ")";
  out << " --" << rule.action << "--> " << rule.target.to_string() << "\n}\n";
  return out.str();
}

std::string print_spec(const SpecDocument& doc) {
  std::ostringstream out;
  if (!doc.sig.actions().empty()) out << "actions " << join(doc.sig.actions(), ", ") << ";\n";
  for (const auto& s : doc.sets) out << "set " << s.name << " = {" << join(s.actions, ", ") << "};\n";
  for (const auto& [op, arity] : doc.sig.operators()) out << "op " << op << " : " << arity << ";\n";
  for (const auto& t : doc.terms) out << "term " << t.name << " = " << t.term.to_string() << ";\n";
  for (const auto& r : doc.rules) out << "\n" << print_rule(r);
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_argument, "cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pgsos
