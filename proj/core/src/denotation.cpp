#include "pgsos/denotation.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <unordered_map>

namespace pgsos {

std::vector<Var> argument_vars(std::size_t arity) {
  std::vector<Var> out;
  for (std::size_t i = 1; i <= arity; ++i) out.push_back(Var::state("x" + std::to_string(i)));
  return out;
}

StateTerm operator_term(const std::string& op, std::size_t arity) {
  std::vector<StateTerm> args;
  for (const auto& v : argument_vars(arity)) args.push_back(StateTerm::variable(v.name));
  return StateTerm::apply(op, std::move(args));
}

const GenSet& DenotationState::term(const AnyTerm& t) const {
  const auto it = terms.find(t);
  if (it == terms.end()) throw Error(ErrorKind::untracked_subterm, "term " + to_string(t) + " is not tracked");
  return it->second;
}

DenotationEngine::DenotationEngine(const SpecDocument& doc, FixpointConfig config)
    : doc_(doc), config_(config) {
  if (config_.max_iterations == 0 || config_.widening_window == 0 ||
      config_.widening_window >= config_.max_iterations) {
    throw Error(ErrorKind::invalid_argument, "need 0 < widening_window < max_iterations");
  }
  for (const auto& r : doc.rules) {
    PGSOSRule renamed = r;
    Substitution sigma;
    const auto vars = argument_vars(r.sources.size());
    for (std::size_t i = 0; i < r.sources.size(); ++i) {
      sigma.bind(Var::state(r.sources[i]), StateTerm::variable(vars[i].name));
      renamed.sources[i] = vars[i].name;
    }
    renamed.target = substitute(r.target, sigma);
    rules_.push_back(std::move(renamed));
  }
}

std::vector<AnyTerm> DenotationEngine::tracked_terms(const std::vector<AnyTerm>& queries) const {
  std::vector<AnyTerm> order;
  std::set<AnyTerm> seen;
  std::vector<AnyTerm> work;
  auto visit = [&](AnyTerm t) {
    if (seen.insert(t).second) {
      order.push_back(t);
      work.push_back(std::move(t));
    }
  };
  for (const auto& q : queries) {
    std::visit([&](const auto& term) { check_signature(term, doc_.sig); }, q);
    visit(q);
  }
  for (const auto& r : rules_) visit(r.target);
  for (const auto& [op, arity] : doc_.sig.operators()) visit(operator_term(op, arity));

  while (!work.empty()) {
    const AnyTerm t = std::move(work.back());
    work.pop_back();
    if (const auto* s = std::get_if<StateTerm>(&t)) {
      if (!s->is_variable()) {
        for (const auto& a : s->args()) visit(a);
      }
      continue;
    }
    const auto& d = std::get<DistTerm>(t);
    switch (d.kind()) {
      case DistTerm::Kind::variable: break;
      case DistTerm::Kind::dirac: visit(d.dirac_term()); break;
      case DistTerm::Kind::convex:
        for (const auto& s : d.summands()) visit(s.term);
        break;
      case DistTerm::Kind::apply:
        for (const auto& a : d.args()) visit(a);
        break;
    }
  }
  return order;
}

DenotationState DenotationEngine::bottom(const std::vector<AnyTerm>& tracked) const {
  DenotationState s;
  for (const auto& t : tracked) s.terms.emplace(t, GenSet{});
  s.rules.assign(rules_.size(), GenSet{});
  return s;
}

GenSet DenotationEngine::denote_rule_step(const DenotationState& state, std::size_t rule) const {
  const PGSOSRule& r = rules_.at(rule);
  std::vector<std::pair<Var, Var>> folds;  // (derivative, source)
  for (const auto& p : r.positive) folds.emplace_back(Var::dist(p.derivative), Var::state(r.sources[p.arg]));

  std::vector<ProbMultiplicity> out;
  for (const auto& p : state.term(r.target).generators()) {
    out.push_back(p_map(p, [&](const Multiplicity& m) {
      Multiplicity acc = m;
      for (const auto& [mu, x] : folds) acc = m_sum(acc, m_dot(m, mu, Multiplicity::unit(x)));
      return acc;
    }));
  }
  return genset_normalize(std::move(out));
}

namespace {

// Calls f with every choice of one generator per set.
template <class F>
void for_each_choice(const std::vector<const GenSet*>& sets, F&& f) {
  std::vector<std::size_t> pick(sets.size(), 0);
  std::vector<const ProbMultiplicity*> chosen(sets.size());
  while (true) {
    for (std::size_t i = 0; i < sets.size(); ++i) chosen[i] = &sets[i]->generators()[pick[i]];
    f(chosen);
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == sets[k]->generators().size()) pick[k++] = 0;
    if (k == pick.size()) return;
  }
}

}  // namespace

GenSet DenotationEngine::denote_term_step(const DenotationState& state, const AnyTerm& t, bool* inexact) const {
  if (inexact) *inexact = false;

  auto apply = [&](const std::vector<const GenSet*>& args,
                   const std::vector<ProbMultiplicity>& op_gens) {
    const auto vars = argument_vars(args.size());
    std::vector<ProbMultiplicity> out;
    for (const auto& p : op_gens) {
      for_each_choice(args, [&](const std::vector<const ProbMultiplicity*>& q) {
        out.push_back(compose(p, vars, q));
      });
    }
    return genset_normalize(std::move(out));
  };

  if (const auto* s = std::get_if<StateTerm>(&t)) {
    if (s->is_variable()) return GenSet::single(ProbMultiplicity::dirac(Multiplicity::unit(Var::state(s->name()))));
    std::vector<ProbMultiplicity> rho;
    for (const auto idx : doc_.rules_for(s->name())) {
      const auto& g = state.rules[idx].generators();
      rho.insert(rho.end(), g.begin(), g.end());
    }
    if (rho.empty()) rho.emplace_back();
    std::vector<const GenSet*> args;
    for (const auto& a : s->args()) args.push_back(&state.term(a));
    return apply(args, genset_normalize(std::move(rho)).generators());
  }

  const auto& d = std::get<DistTerm>(t);
  switch (d.kind()) {
    case DistTerm::Kind::variable:
      return GenSet::single(ProbMultiplicity::dirac(Multiplicity::unit(Var::dist(d.name()))));
    case DistTerm::Kind::dirac:
      return state.term(d.dirac_term());
    case DistTerm::Kind::convex: {
      std::vector<const GenSet*> parts;
      for (const auto& s : d.summands()) parts.push_back(&state.term(s.term));
      std::vector<ProbMultiplicity> out;
      for_each_choice(parts, [&](const std::vector<const ProbMultiplicity*>& chosen) {
        std::vector<std::pair<Rational, const ProbMultiplicity*>> weighted;
        for (std::size_t i = 0; i < chosen.size(); ++i) weighted.emplace_back(d.summands()[i].weight, chosen[i]);
        out.push_back(p_convex(weighted));
      });
      return genset_normalize(std::move(out));
    }
    case DistTerm::Kind::apply: {
      // Different states in the support may use different rules, so the
      // operator counts as the least cover of all its rules, each raised to
      // one copy of every argument it tests.
      std::vector<ProbMultiplicity> covers;
      for (const auto idx : doc_.rules_for(d.name())) {
        const auto& gens = state.rules[idx].generators();
        covers.insert(covers.end(), gens.begin(), gens.end());
        if (config_.reactive_testing_correction) {
          std::vector<Var> tested;
          for (const auto i : rules_[idx].tested_args()) tested.push_back(Var::state(rules_[idx].sources[i]));
          covers.push_back(ProbMultiplicity::dirac(Multiplicity::of(tested, 1)));
        }
      }
      if (covers.empty()) covers.emplace_back();
      bool exact = true;
      const ProbMultiplicity rho = sup_approx(covers, &exact);
      if (inexact) *inexact = !exact;
      std::vector<const GenSet*> args;
      for (const auto& a : d.args()) args.push_back(&state.term(a));
      return apply(args, {rho});
    }
  }
  return GenSet{};
}

DenotationState DenotationEngine::apply_functor(const DenotationState& state) const {
  DenotationState next;
  for (const auto& [t, g] : state.terms) next.terms.emplace(t, denote_term_step(state, t));
  for (std::size_t r = 0; r < rules_.size(); ++r) next.rules.push_back(denote_rule_step(state, r));
  return next;
}

std::pair<std::vector<AnyTerm>, std::vector<std::size_t>> DenotationEngine::term_dependencies(
    const AnyTerm& t) const {
  std::vector<AnyTerm> terms;
  std::vector<std::size_t> rules;
  if (const auto* s = std::get_if<StateTerm>(&t)) {
    if (!s->is_variable()) {
      terms.assign(s->args().begin(), s->args().end());
      rules = doc_.rules_for(s->name());
    }
    return {terms, rules};
  }
  const auto& d = std::get<DistTerm>(t);
  switch (d.kind()) {
    case DistTerm::Kind::variable: break;
    case DistTerm::Kind::dirac: terms.push_back(d.dirac_term()); break;
    case DistTerm::Kind::convex:
      for (const auto& s : d.summands()) terms.push_back(s.term);
      break;
    case DistTerm::Kind::apply:
      terms.assign(d.args().begin(), d.args().end());
      rules = doc_.rules_for(d.name());
      break;
  }
  return {terms, rules};
}

namespace {

// Nodes are tracked terms (0..T-1) followed by rules (T..T+R-1).
struct Graph {
  std::vector<AnyTerm> terms;
  std::map<AnyTerm, std::size_t> term_index;
  std::size_t num_rules = 0;
  std::vector<std::vector<std::size_t>> deps;

  std::size_t size() const { return deps.size(); }
  bool is_rule(std::size_t n) const { return n >= terms.size(); }
  std::size_t rule_of(std::size_t n) const { return n - terms.size(); }
};

// Tarjan's algorithm; components come out dependencies first. Within each
// component nodes are listed in reverse discovery order.
std::vector<std::vector<std::size_t>> components(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != SIZE_MAX) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next_edge < g.deps[f.node].size()) {
        const std::size_t w = g.deps[f.node][f.next_edge++];
        if (index[w] == SIZE_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const std::size_t v = f.node;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end(), [&](std::size_t a, std::size_t b) { return index[a] > index[b]; });
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

Weighting sup_weighting(const GenSet& g) { return weighting(sup_approx(g.generators())); }

GenSet widen(const GenSet& g, const std::vector<Var>& vars) {
  std::vector<ProbMultiplicity> out;
  for (const auto& p : g.generators()) {
    out.push_back(p_map(p, [&](const Multiplicity& m) {
      Multiplicity w = m;
      for (const auto& v : vars) w.set(v, Count::infinity());
      return w;
    }));
  }
  return genset_normalize(std::move(out));
}

}  // namespace

bool DenotationResult::widened(const AnyTerm& t) const {
  const auto ti = term_reach.find(t);
  const auto ri = rule_reach.find(t);
  if (ti == term_reach.end()) return widened_terms.count(t) > 0;
  for (const auto& u : ti->second) {
    if (widened_terms.count(u)) return true;
  }
  if (ri != rule_reach.end()) {
    for (const auto r : ri->second) {
      if (widened_rules.count(r)) return true;
    }
  }
  return false;
}

bool DenotationResult::over_approximated(const AnyTerm& t) const {
  const auto ti = term_reach.find(t);
  if (ti == term_reach.end()) return inexact_terms.count(t) > 0;
  return std::any_of(ti->second.begin(), ti->second.end(),
                     [&](const AnyTerm& u) { return inexact_terms.count(u) > 0; });
}

DenotationResult lfp_denotations(const DenotationEngine& engine, const std::vector<AnyTerm>& queries) {
  const auto& cfg = engine.config();
  Graph g;
  g.terms = engine.tracked_terms(queries);
  for (std::size_t i = 0; i < g.terms.size(); ++i) g.term_index.emplace(g.terms[i], i);
  g.num_rules = engine.rules().size();
  g.deps.resize(g.terms.size() + g.num_rules);
  for (std::size_t i = 0; i < g.terms.size(); ++i) {
    const auto [terms, rules] = engine.term_dependencies(g.terms[i]);
    for (const auto& t : terms) g.deps[i].push_back(g.term_index.at(t));
    for (const auto r : rules) g.deps[i].push_back(g.terms.size() + r);
  }
  for (std::size_t r = 0; r < g.num_rules; ++r) {
    g.deps[g.terms.size() + r].push_back(g.term_index.at(AnyTerm(engine.rules()[r].target)));
  }

  DenotationResult result;
  result.state = engine.bottom(g.terms);
  auto value = [&](std::size_t n) -> GenSet& {
    return g.is_rule(n) ? result.state.rules[g.rule_of(n)] : result.state.terms.at(g.terms[n]);
  };
  auto step = [&](std::size_t n, bool* inexact) {
    if (g.is_rule(n)) {
      if (inexact) *inexact = false;
      return engine.denote_rule_step(result.state, g.rule_of(n));
    }
    return engine.denote_term_step(result.state, g.terms[n], inexact);
  };

  std::vector<bool> inexact(g.size(), false);
  for (const auto& comp : components(g)) {
    const bool cyclic = comp.size() > 1 ||
                        std::find(g.deps[comp[0]].begin(), g.deps[comp[0]].end(), comp[0]) != g.deps[comp[0]].end();
    if (!cyclic) {
      bool flag = false;
      value(comp[0]) = step(comp[0], &flag);
      inexact[comp[0]] = flag;
      result.rounds = std::max<std::size_t>(result.rounds, 1);
      continue;
    }

    // history[k][round] = weighted sup of node comp[k] after that round
    std::vector<std::vector<Weighting>> history(comp.size());
    for (std::size_t k = 0; k < comp.size(); ++k) history[k].push_back(sup_weighting(value(comp[k])));

    for (std::size_t round = 1;; ++round) {
      if (round > cfg.max_iterations) {
        throw Error(ErrorKind::iteration_limit_exceeded,
                    "denotations still growing after " + std::to_string(cfg.max_iterations) + " rounds");
      }
      bool changed = false;
      for (const auto n : comp) {
        bool flag = false;
        GenSet next = step(n, &flag);
        inexact[n] = flag;
        GenSet& cur = value(n);
        if (!genset_leq(next, cur)) {
          changed = true;
          cur = genset_union(cur, next);
        }
      }
      result.rounds = std::max(result.rounds, round);

      const std::size_t w = cfg.widening_window;
      for (std::size_t k = 0; k < comp.size(); ++k) {
        auto& h = history[k];
        h.push_back(sup_weighting(value(comp[k])));
        if (h.size() <= w) continue;
        std::vector<Var> grow;
        for (const auto& [v, now] : h.back()) {
          if (now.is_infinite()) continue;
          std::size_t increases = 0;
          bool shrank = false;
          for (std::size_t i = h.size() - w; i < h.size(); ++i) {
            const auto before = weight_at(h[i - 1], v);
            const auto after = weight_at(h[i], v);
            if (after < before) shrank = true;
            if (after > before) ++increases;
          }
          const bool last_up = weight_at(h[h.size() - 2], v) < now;
          if (!shrank && last_up && 2 * increases >= w) grow.push_back(v);
        }
        if (grow.empty()) continue;
        value(comp[k]) = widen(value(comp[k]), grow);
        h.back() = sup_weighting(value(comp[k]));
        changed = true;
        if (g.is_rule(comp[k])) {
          result.widened_rules.insert(g.rule_of(comp[k]));
        } else {
          result.widened_terms.insert(g.terms[comp[k]]);
        }
      }
      if (!changed) break;
    }
  }

  for (std::size_t n = 0; n < g.terms.size(); ++n) {
    if (inexact[n]) result.inexact_terms.insert(g.terms[n]);
  }

  // Transitive dependencies per tracked term, for per-term flags.
  for (std::size_t start = 0; start < g.terms.size(); ++start) {
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> work{start};
    seen[start] = true;
    auto& terms = result.term_reach[g.terms[start]];
    auto& rules = result.rule_reach[g.terms[start]];
    while (!work.empty()) {
      const std::size_t n = work.back();
      work.pop_back();
      if (g.is_rule(n)) {
        rules.insert(g.rule_of(n));
      } else {
        terms.insert(g.terms[n]);
      }
      for (const auto d : g.deps[n]) {
        if (!seen[d]) {
          seen[d] = true;
          work.push_back(d);
        }
      }
    }
  }
  return result;
}

DenotationResult lfp_denotations(const SpecDocument& doc, const std::vector<AnyTerm>& queries,
                                 const FixpointConfig& config) {
  const DenotationEngine engine(doc, config);
  return lfp_denotations(engine, queries);
}

Rational bound_distance(const DenotationResult& result, const StateTerm& t, const ProcessDistance& e) {
  return da(result.denotation(t), e);
}

Rational bound_distance(const SpecDocument& doc, const StateTerm& t, const ProcessDistance& e,
                        const FixpointConfig& config) {
  return bound_distance(lfp_denotations(doc, {t}, config), t, e);
}

}  // namespace pgsos
