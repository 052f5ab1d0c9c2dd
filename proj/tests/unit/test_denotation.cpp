#include "doctest.h"
#include "errors.hpp"
#include "oracles.hpp"
#include "pgsos/denotation.hpp"

using namespace pgsos;
using oracle::error_kind;
using oracle::q;

namespace {

const SpecDocument& pa() {
  static const SpecDocument doc = oracle::load("pa.pgsos");
  return doc;
}
const SpecDocument& ex() {
  static const SpecDocument doc = oracle::load("examples.pgsos");
  return doc;
}

Multiplicity mult(std::initializer_list<std::pair<const char*, Count>> xs) {
  Multiplicity m;
  for (const auto& [v, c] : xs) m.set(Var::state(v), c);
  return m;
}

GenSet dirac(std::initializer_list<std::pair<const char*, Count>> xs) {
  return GenSet::single(ProbMultiplicity::dirac(mult(xs)));
}

std::string denote(const SpecDocument& doc, const std::string& t, const FixpointConfig& cfg = {}) {
  const StateTerm term = doc.parse_term(t);
  return lfp_denotations(doc, {term}, cfg).denotation(term).to_string();
}

}  // namespace

TEST_CASE("configuration is validated") {
  CHECK(error_kind([] { DenotationEngine(pa(), {8, 8, true}); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([] { DenotationEngine(pa(), {8, 0, true}); }) == ErrorKind::invalid_argument);
  CHECK_FALSE(error_kind([] { DenotationEngine(pa(), {8, 7, true}); }).has_value());
}

TEST_CASE("argument variables and operator terms") {
  CHECK(argument_vars(2) == std::vector<Var>{Var::state("x1"), Var::state("x2")});
  CHECK(operator_term("par", 2).to_string() == "par(x1, x2)");
  CHECK(operator_term("zero", 0).to_string() == "zero");
}

TEST_CASE("tracked terms cover queries, rule targets and operators") {
  const DenotationEngine engine(ex());
  const StateTerm q1 = ex().parse_term("par(x, dup_par(y))");
  const auto tracked = engine.tracked_terms({q1});
  auto has = [&](const AnyTerm& t) { return std::find(tracked.begin(), tracked.end(), t) != tracked.end(); };
  CHECK(has(q1));
  CHECK(has(AnyTerm(ex().parse_term("dup_par(y)"))));
  CHECK(has(AnyTerm(ex().parse_term("y"))));
  for (const auto& [op, n] : ex().sig.operators()) CHECK(has(AnyTerm(operator_term(op, n))));
  for (const auto& r : engine.rules()) CHECK(has(AnyTerm(r.target)));
  CHECK(error_kind([&] { engine.tracked_terms({ex().parse_term("x")}).size(); }) == std::nullopt);
  CHECK(error_kind([&] { engine.tracked_terms({StateTerm::apply("nope")}); }) == ErrorKind::undeclared_symbol);
}

TEST_CASE("rules are renamed to positional sources") {
  const DenotationEngine engine(ex());
  for (const auto& r : engine.rules()) {
    for (std::size_t i = 0; i < r.sources.size(); ++i) CHECK(r.sources[i] == "x" + std::to_string(i + 1));
  }
}

TEST_CASE("untracked terms are reported") {
  const auto res = lfp_denotations(pa(), {pa().parse_term("x")});
  CHECK(error_kind([&] { res.denotation(pa().parse_term("par(y, y)")); }) == ErrorKind::untracked_subterm);
}

TEST_CASE("PA closed forms compose") {
  CHECK(denote(pa(), "zero") == "1@{}");
  CHECK(denote(pa(), "par(pref_a(x), y)") == "1@{x:1, y:1}");
  CHECK(denote(pa(), "par(x, x)") == "1@{x:2}");
  CHECK(denote(pa(), "pa_5_5(par(x, x), zero)") == "1/2@{} + 1/2@{x:2}");
  CHECK(denote(pa(), "choice(x, par(x, y))") == "1@{x:1, y:1}");
  CHECK(denote(pa(), "par(x, AA)") == "1@{x:1}");
}

TEST_CASE("distribution terms can be queried") {
  const DistTerm d = parse_dist_term("1/2*delta(x) + 1/2*delta(zero)", pa().sig);
  const auto res = lfp_denotations(pa(), {d});
  CHECK(res.denotation(d).to_string() == "1/2@{} + 1/2@{x:1}");
}

TEST_CASE("operators beyond the canonical fragment") {
  CHECK(denote(ex(), "dup_par(x)") == "1@{x:2}");
  CHECK(denote(ex(), "dup_choice(x)") == "1@{x:2}");
  CHECK(denote(ex(), "mimic(x)") == "1@{x:1}");
  CHECK(denote(ex(), "probe(y)") == "1@{}");
  FixpointConfig off;
  off.reactive_testing_correction = false;
  CHECK(denote(ex(), "mimic(x)", off) == "1@{}");
}

TEST_CASE("replication is widened to infinity") {
  for (const char* t : {"repl(x)", "irepl(x)"}) {
    CAPTURE(t);
    const StateTerm term = ex().parse_term(t);
    const auto res = lfp_denotations(ex(), {term});
    CHECK(res.denotation(term) == dirac({{"x", Count::infinity()}}));
    CHECK(res.widened(term));
    CHECK(res.any_widened());
    ProcessDistance e;
    e.set(Var::state("x"), q(1, 100));
    CHECK(bound_distance(res, term, e) == q(1));
    CHECK(bound_distance(res, term, ProcessDistance{}) == q(0));
  }
  // Unrelated entries are not flagged.
  const auto res = lfp_denotations(ex(), {ex().parse_term("dup_par(x)")});
  CHECK_FALSE(res.widened(ex().parse_term("dup_par(x)")));
}

TEST_CASE("iteration limit") {
  CHECK(error_kind([] { lfp_denotations(ex(), {ex().parse_term("repl(x)")}, {2, 1, true}); }) ==
        ErrorKind::iteration_limit_exceeded);
}

TEST_CASE("the result is a fixed point reached by an increasing chain") {
  for (const SpecDocument* doc : {&pa(), &ex()}) {
    const DenotationEngine engine(*doc);
    std::vector<AnyTerm> queries;
    for (const char* t : {"par(x, y)", "choice(pref_a(x), ipar(x, y))"}) queries.emplace_back(doc->parse_term(t));
    const auto res = lfp_denotations(engine, queries);
    const auto next = engine.apply_functor(res.state);
    for (const auto& [t, g] : res.state.terms) {
      CAPTURE(to_string(t));
      // Widened entries are a post-fixed point, the rest a fixed point.
      CHECK(genset_leq(next.terms.at(t), g));
      if (!res.widened(t)) CHECK(genset_equivalent(next.terms.at(t), g));
    }

    // Kleene chain from bottom stays below the result.
    auto state = engine.bottom(engine.tracked_terms(queries));
    for (int i = 0; i < 6; ++i) {
      const auto after = engine.apply_functor(state);
      for (const auto& [t, g] : after.terms) {
        CHECK(genset_leq(state.terms.at(t), g));
        CHECK(genset_leq(g, res.state.terms.at(t)));
      }
      state = after;
    }
  }
}

TEST_CASE("rule step adds one copy per positive premise") {
  const DenotationEngine engine(ex());
  const auto res = lfp_denotations(engine, {});
  for (std::size_t i = 0; i < engine.rules().size(); ++i) {
    const auto& r = engine.rules()[i];
    if (r.op != "dup_par") continue;
    // The derivative is kept next to the source until the term clause folds it.
    CHECK(res.state.rules.at(i).to_string() == "1@{mu:2, x1:2}");
  }
}

TEST_CASE("dependencies of a term clause") {
  const DenotationEngine engine(pa());
  const auto [terms, rules] = engine.term_dependencies(pa().parse_term("par(x, y)"));
  CHECK(terms == std::vector<AnyTerm>{AnyTerm(pa().parse_term("x")), AnyTerm(pa().parse_term("y"))});
  CHECK(rules == pa().rules_for("par"));
  const auto [vt, vr] = engine.term_dependencies(pa().parse_term("x"));
  CHECK(vt.empty());
  CHECK(vr.empty());
  const auto [op_terms, op_rules] = engine.term_dependencies(operator_term("choice", 2));
  CHECK(op_rules.size() == pa().rules_for("choice").size());
}
