#include "pgsos/semantics.hpp"

#include <algorithm>
#include <functional>

namespace pgsos {

const std::vector<Transition>& TransitionEngine::transitions(const StateTerm& t) {
  {
    std::lock_guard lock(mutex_);
    if (const auto it = memo_.find(t); it != memo_.end()) return *it->second;
  }
  auto computed = std::make_shared<const std::vector<Transition>>(derive(t));
  std::lock_guard lock(mutex_);
  // A concurrent caller may have won the race; both results are identical.
  const auto [it, inserted] = memo_.try_emplace(t, std::move(computed));
  return *it->second;
}

std::set<std::string> TransitionEngine::enabled_actions(const StateTerm& t) {
  std::set<std::string> out;
  for (const auto& tr : transitions(t)) out.insert(tr.action);
  return out;
}

std::vector<FiniteDistribution> TransitionEngine::derivatives(const StateTerm& t,
                                                              const std::string& action) {
  std::vector<FiniteDistribution> out;
  for (const auto& tr : transitions(t)) {
    if (tr.action == action) out.push_back(tr.target);
  }
  return out;
}

std::vector<Transition> TransitionEngine::derive(const StateTerm& t) {
  if (!t.is_closed()) throw Error(ErrorKind::invalid_argument, "term " + t.to_string() + " is not closed");

  // Premises only look at proper subterms, so recursion on the arguments is
  // well founded.
  std::vector<const std::vector<Transition>*> arg_transitions;
  for (const auto& arg : t.args()) arg_transitions.push_back(&transitions(arg));

  std::set<Transition> found;
  for (const auto idx : doc_.rules_for(t.name())) {
    const PGSOSRule& rule = doc_.rules[idx];

    const bool negatives_hold = std::all_of(
        rule.negative.begin(), rule.negative.end(), [&](const NegativePremise& n) {
          const auto& ts = *arg_transitions[n.arg];
          return std::none_of(ts.begin(), ts.end(),
                              [&](const Transition& tr) { return tr.action == n.action; });
        });
    if (!negatives_hold) continue;

    std::vector<std::vector<const FiniteDistribution*>> choices;
    for (const auto& p : rule.positive) {
      std::vector<const FiniteDistribution*> options;
      for (const auto& tr : *arg_transitions[p.arg]) {
        if (tr.action == p.action) options.push_back(&tr.target);
      }
      if (options.empty()) break;
      choices.push_back(std::move(options));
    }
    if (choices.size() != rule.positive.size()) continue;

    Environment env;
    for (std::size_t i = 0; i < rule.sources.size(); ++i) env.states.insert_or_assign(rule.sources[i], t.args()[i]);

    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < choices.size(); ++k) {
        env.dists.insert_or_assign(rule.positive[k].derivative, *choices[k][pick[k]]);
      }
      found.insert(Transition{rule.action, evaluate(rule.target, env)});

      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }
  return {found.begin(), found.end()};
}

std::vector<Transition> derive_transitions(const SpecDocument& doc, const StateTerm& t) {
  TransitionEngine engine(doc);
  return engine.transitions(t);
}

std::optional<std::size_t> ReachableFragment::index_of(const StateTerm& t) const {
  if (const auto it = index.find(t); it != index.end()) return it->second;
  return std::nullopt;
}

std::vector<const FiniteDistribution*> ReachableFragment::der(std::size_t state,
                                                              const std::string& action) const {
  std::vector<const FiniteDistribution*> out;
  for (const auto& tr : transitions[state]) {
    if (tr.action == action) out.push_back(&tr.target);
  }
  return out;
}

std::set<std::string> ReachableFragment::enabled(std::size_t state) const {
  std::set<std::string> out;
  for (const auto& tr : transitions[state]) out.insert(tr.action);
  return out;
}

bool ReachableFragment::has_cycle() const {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> mark(states.size(), 0);
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack;
  auto successors = [&](std::size_t s) {
    std::set<std::size_t> succ;
    for (const auto& tr : transitions[s]) {
      for (const auto& [u, p] : tr.target.masses()) {
        if (const auto j = index_of(u)) succ.insert(*j);
      }
    }
    return std::vector<std::size_t>(succ.rbegin(), succ.rend());
  };
  for (std::size_t root = 0; root < states.size(); ++root) {
    if (mark[root]) continue;
    mark[root] = 1;
    stack.emplace_back(root, successors(root));
    while (!stack.empty()) {
      auto& [s, pending] = stack.back();
      if (pending.empty()) {
        mark[s] = 2;
        stack.pop_back();
        continue;
      }
      const std::size_t next = pending.back();
      pending.pop_back();
      if (mark[next] == 1) return true;
      if (mark[next] == 0) {
        mark[next] = 1;
        stack.emplace_back(next, successors(next));
      }
    }
  }
  return false;
}

ReachableFragment explore_fragment(TransitionEngine& engine, const std::vector<StateTerm>& roots,
                                   const ExplorationLimits& limits) {
  ReachableFragment frag;
  auto add = [&](const StateTerm& t) {
    const auto [it, inserted] = frag.index.try_emplace(t, frag.states.size());
    if (inserted) {
      frag.states.push_back(t);
      frag.transitions.emplace_back();
    }
    return inserted;
  };

  std::vector<std::size_t> layer;
  for (const auto& r : roots) {
    if (!r.is_closed()) throw Error(ErrorKind::invalid_argument, "term " + r.to_string() + " is not closed");
    if (add(r)) layer.push_back(frag.states.size() - 1);
    frag.roots.push_back(frag.index.at(r));
  }
  if (frag.states.size() > limits.max_states) {
    throw ExplorationError(ErrorKind::state_limit_exceeded,
                           "more than " + std::to_string(limits.max_states) + " states", frag);
  }

  std::size_t depth = 0;
  while (!layer.empty()) {
    frag.depth = depth;
    if (depth >= limits.max_depth) {
      throw ExplorationError(ErrorKind::depth_limit_exceeded,
                             "exploration deeper than " + std::to_string(limits.max_depth), frag);
    }
    std::set<StateTerm> fresh;
    for (const auto s : layer) {
      frag.transitions[s] = engine.transitions(frag.states[s]);
      for (const auto& tr : frag.transitions[s]) {
        for (const auto& [u, p] : tr.target.masses()) {
          if (!frag.index.count(u)) fresh.insert(u);
        }
      }
    }
    std::vector<std::size_t> next;
    for (const auto& u : fresh) {
      if (frag.states.size() == limits.max_states) {
        throw ExplorationError(ErrorKind::state_limit_exceeded,
                               "more than " + std::to_string(limits.max_states) + " states", frag);
      }
      add(u);
      next.push_back(frag.states.size() - 1);
    }
    layer = std::move(next);
    ++depth;
  }
  frag.complete = true;
  return frag;
}

ReachableFragment explore_fragment(const SpecDocument& doc, const std::vector<StateTerm>& roots,
                                   const ExplorationLimits& limits) {
  TransitionEngine engine(doc);
  return explore_fragment(engine, roots, limits);
}

}  // namespace pgsos
