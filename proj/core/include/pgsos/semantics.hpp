#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pgsos/spec.hpp"
#include "pgsos/terms.hpp"

namespace pgsos {

struct Transition {
  std::string action;
  FiniteDistribution target;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend bool operator<(const Transition& a, const Transition& b) {
    if (a.action != b.action) return a.action < b.action;
    return a.target < b.target;
  }
};

/// Transitions of closed terms in the supported model of a spec, memoized.
/// Safe to share between threads.
class TransitionEngine {
 public:
  explicit TransitionEngine(const SpecDocument& doc) : doc_(doc) {}

  /// Sorted by action, then target; duplicates removed. Throws
  /// Error(invalid_argument) for an open term.
  const std::vector<Transition>& transitions(const StateTerm& t);
  std::set<std::string> enabled_actions(const StateTerm& t);
  std::vector<FiniteDistribution> derivatives(const StateTerm& t, const std::string& action);

  const SpecDocument& spec() const { return doc_; }

 private:
  std::vector<Transition> derive(const StateTerm& t);

  const SpecDocument& doc_;
  std::mutex mutex_;
  std::unordered_map<StateTerm, std::shared_ptr<const std::vector<Transition>>> memo_;
};

std::vector<Transition> derive_transitions(const SpecDocument& doc, const StateTerm& t);

struct ExplorationLimits {
  std::size_t max_states = 10000;
  std::size_t max_depth = 10000;
};

/// States reachable from the roots through transition supports. State
/// numbering is breadth-first; within one layer new states are numbered in
/// term order.
struct ReachableFragment {
  std::vector<StateTerm> states;
  std::vector<std::vector<Transition>> transitions;  // parallel to states
  std::unordered_map<StateTerm, std::size_t> index;
  std::vector<std::size_t> roots;
  std::size_t depth = 0;  // deepest layer reached
  bool complete = false;

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> index_of(const StateTerm& t) const;
  /// Targets of `state` under `action`.
  std::vector<const FiniteDistribution*> der(std::size_t state, const std::string& action) const;
  std::set<std::string> enabled(std::size_t state) const;
  bool has_cycle() const;
};

/// Thrown when exploration stops at a limit; carries what was explored so far
/// (complete = false, unexpanded states have no transitions listed).
class ExplorationError : public Error {
 public:
  ExplorationError(ErrorKind kind, const std::string& message, ReachableFragment partial)
      : Error(kind, message), partial_(std::move(partial)) {}
  const ReachableFragment& partial() const noexcept { return partial_; }

 private:
  ReachableFragment partial_;
};

/// Throws ExplorationError(state_limit_exceeded / depth_limit_exceeded).
ReachableFragment explore_fragment(TransitionEngine& engine, const std::vector<StateTerm>& roots,
                                   const ExplorationLimits& limits = {});
ReachableFragment explore_fragment(const SpecDocument& doc, const std::vector<StateTerm>& roots,
                                   const ExplorationLimits& limits = {});

}  // namespace pgsos
