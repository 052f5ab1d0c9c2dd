#include <set>
#include <thread>

#include "doctest.h"
#include "errors.hpp"
#include "oracles.hpp"
#include "pgsos/semantics.hpp"

using namespace pgsos;
using oracle::error_kind;

namespace {

const SpecDocument& pa() {
  static const SpecDocument doc = oracle::load("pa.pgsos");
  return doc;
}

std::vector<Transition> trans(const SpecDocument& doc, const std::string& t) {
  return derive_transitions(doc, doc.parse_term(t));
}

std::vector<std::string> pa_ops() {
  std::vector<std::string> ops;
  for (const auto& [op, n] : pa().sig.operators()) ops.push_back(op);
  return ops;
}

}  // namespace

TEST_CASE("probabilistic prefix") {
  const auto ts = trans(pa(), "A91");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].action == "a");
  CHECK(ts[0].target.mass(pa().parse_term("pref_a(zero)")) == Rational(9, 10));
  CHECK(ts[0].target.mass(pa().parse_term("zero")) == Rational(1, 10));
  CHECK(trans(pa(), "zero").empty());
}

TEST_CASE("alternative, synchronous and interleaving composition") {
  CHECK(trans(pa(), "choice(AA, BB)").size() == 2);
  CHECK(trans(pa(), "choice(AA, AA)").size() == 1);  // duplicates collapse
  CHECK(trans(pa(), "par(AA, BB)").empty());
  CHECK(trans(pa(), "ipar(AA, BB)").size() == 2);
  const auto ts = trans(pa(), "par_a(pref_b(zero), AA)");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].action == "b");
  CHECK(ts[0].target == FiniteDistribution::dirac(pa().parse_term("par_a(zero, AA)")));
  const auto sync = trans(pa(), "par(A91, A91)");
  REQUIRE(sync.size() == 1);
  CHECK(sync[0].target.support_size() == 4);
  CHECK(sync[0].target.mass(pa().parse_term("par(pref_a(zero), pref_a(zero))")) == Rational(81, 100));
}

TEST_CASE("negative premises") {
  const auto doc = parse_spec(R"(
actions a, b;
op zero : 0;
op pref_a : 1;
rule { --- pref_a(x) --a--> delta(x) }
op pref_b : 1;
rule { --- pref_b(x) --b--> delta(x) }
op choice : 2;
rule forall c in ACT { x1 --c--> mu --- choice(x1, x2) --c--> mu }
rule forall c in ACT { x2 --c--> mu --- choice(x1, x2) --c--> mu }
# b only when a is impossible
op pri : 1;
rule pri_a { x --a--> mu --- pri(x) --a--> mu }
rule pri_b { x -/a-> x --b--> mu --- pri(x) --b--> mu }
)");
  auto actions = [&](const std::string& t) {
    std::set<std::string> out;
    for (const auto& tr : trans(doc, t)) out.insert(tr.action);
    return out;
  };
  CHECK(actions("pri(choice(pref_a(zero), pref_b(zero)))") == std::set<std::string>{"a"});
  CHECK(actions("pri(pref_b(zero))") == std::set<std::string>{"b"});
  CHECK(actions("pri(pri(pref_b(zero)))") == std::set<std::string>{"b"});
  CHECK(actions("pri(zero)").empty());
}

TEST_CASE("transitions compose like the operators say") {
  // par moves iff both sides move on the same action, with the product
  // distribution; choice is the union.
  oracle::Random r(3);
  TransitionEngine engine(pa());
  const auto ops = pa_ops();
  for (int i = 0; i < 60; ++i) {
    const StateTerm t1 = oracle::random_closed(r, pa(), ops, 2);
    const StateTerm t2 = oracle::random_closed(r, pa(), ops, 2);
    std::set<Transition> want_par, want_choice;
    for (const auto& x : engine.transitions(t1)) {
      want_choice.insert(x);
      for (const auto& y : engine.transitions(t2)) {
        if (x.action == y.action) want_par.insert({x.action, lift_operator("par", {x.target, y.target})});
      }
    }
    for (const auto& y : engine.transitions(t2)) want_choice.insert(y);
    const auto& got_par = engine.transitions(StateTerm::apply("par", {t1, t2}));
    const auto& got_choice = engine.transitions(StateTerm::apply("choice", {t1, t2}));
    CHECK(std::set<Transition>(got_par.begin(), got_par.end()) == want_par);
    CHECK(std::set<Transition>(got_choice.begin(), got_choice.end()) == want_choice);
    CHECK(std::is_sorted(got_choice.begin(), got_choice.end()));
  }
}

TEST_CASE("open terms have no transitions to compute") {
  CHECK(error_kind([] { trans(pa(), "par(x, AA)"); }) == ErrorKind::invalid_argument);
}

TEST_CASE("exploration is breadth first and deterministic") {
  const auto t1 = pa().parse_term("par(AA, AA)"), t2 = pa().parse_term("par(A91, A91)");
  const auto frag = explore_fragment(pa(), {t1, t2});
  CHECK(frag.complete);
  CHECK_FALSE(frag.has_cycle());
  CHECK(frag.roots == std::vector<std::size_t>{0, 1});
  CHECK(frag.states[0] == t1);
  CHECK(frag.states[1] == t2);
  // par(zero, zero) is already one step from the second root.
  CHECK(frag.depth == 1);
  CHECK(explore_fragment(pa(), {t1}).depth == 2);
  for (std::size_t i = 0; i < frag.size(); ++i) CHECK(*frag.index_of(frag.states[i]) == i);
  const auto again = explore_fragment(pa(), {t1, t2});
  CHECK(again.states == frag.states);
  CHECK(frag.enabled(0) == std::set<std::string>{"a"});
  CHECK(frag.der(1, "a").size() == 1);
  CHECK(frag.der(1, "b").empty());
}

TEST_CASE("cycles and limits") {
  const auto doc = parse_spec(R"(
actions a;
op loop : 0;
rule { --- loop --a--> delta(loop) }
op grow : 1;
rule { --- grow(x) --a--> delta(grow(grow(x))) }
op zero : 0;
)");
  const auto loop = explore_fragment(doc, {doc.parse_term("loop")});
  CHECK(loop.size() == 1);
  CHECK(loop.has_cycle());

  try {
    explore_fragment(doc, {doc.parse_term("grow(zero)")}, {5, 100});
    FAIL("expected a state limit");
  } catch (const ExplorationError& e) {
    CHECK(e.kind() == ErrorKind::state_limit_exceeded);
    CHECK_FALSE(e.partial().complete);
    CHECK(e.partial().size() == 5);
  }
  try {
    explore_fragment(doc, {doc.parse_term("grow(zero)")}, {100, 3});
    FAIL("expected a depth limit");
  } catch (const ExplorationError& e) {
    CHECK(e.kind() == ErrorKind::depth_limit_exceeded);
    CHECK(e.partial().depth <= 3);
  }
}

TEST_CASE("the engine can be shared between threads") {
  TransitionEngine engine(pa());
  oracle::Random r(4);
  const auto ops = pa_ops();
  std::vector<StateTerm> terms;
  for (int i = 0; i < 40; ++i) terms.push_back(oracle::random_closed(r, pa(), ops, 3));
  std::vector<std::vector<std::vector<Transition>>> seen(4);
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([&, k] {
      for (const auto& t : terms) seen[k].push_back(engine.transitions(t));
    });
  }
  for (auto& th : threads) th.join();
  for (int k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < terms.size(); ++i) CHECK(seen[k][i] == derive_transitions(pa(), terms[i]));
  }
}
