#include "doctest.h"
#include "errors.hpp"
#include "oracles.hpp"
#include "pgsos/oracle.hpp"

using namespace pgsos;
using oracle::error_kind;
using oracle::q;

namespace {

const SpecDocument& pa() {
  static const SpecDocument doc = oracle::load("pa.pgsos");
  return doc;
}

ClosedSubstitution sub(const std::string& v, const std::string& t) { return {{v, pa().parse_term(t)}}; }

}  // namespace

TEST_CASE("the bound is tight on the synchronous pair") {
  const auto s = evaluate_sample(pa(), pa().parse_term("par(x, x)"), sub("x", "AA"), sub("x", "A91"));
  REQUIRE(s.status == SampleStatus::ok);
  CHECK(s.distance == q(19, 100));
  CHECK(s.bound == q(19, 100));
  CHECK(s.gap() == q(0));
  CHECK_FALSE(s.violation());
}

TEST_CASE("over-approximation when the context blocks the difference") {
  const auto s = evaluate_sample(pa(), pa().parse_term("par(x, AA)"), sub("x", "AB"), sub("x", "AB91"));
  REQUIRE(s.status == SampleStatus::ok);
  CHECK(s.distance == q(0));
  CHECK(s.gap() == q(1, 10));
}

TEST_CASE("samples at distance 1 are set aside") {
  const auto s = evaluate_sample(pa(), pa().parse_term("par(x, x)"), sub("x", "AA"), sub("x", "BB"));
  CHECK(s.status == SampleStatus::distance_one);
  CHECK(error_kind([] {
          evaluate_sample(pa(), pa().parse_term("par(x, y)"), sub("x", "AA"), sub("x", "AA"));
        }) == ErrorKind::invalid_argument);
}

TEST_CASE("random runs are reproducible and sound") {
  OracleConfig cfg;
  cfg.seed = 42;
  cfg.samples = 40;
  const auto a = oracle_compare(pa(), cfg);
  const auto b = oracle_compare(pa(), cfg);
  REQUIRE(a.samples.size() == 40);
  CHECK(a.violations == 0);
  CHECK(a.attempts == b.attempts);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].term == b.samples[i].term);
    CHECK(a.samples[i].sigma2 == b.samples[i].sigma2);
    CHECK(a.samples[i].bound == b.samples[i].bound);
    CHECK(a.samples[i].distance <= a.samples[i].bound);
    CHECK(a.samples[i].term.depth() <= 4);
  }
  cfg.seed = 43;
  const auto c = oracle_compare(pa(), cfg);
  bool differs = false;
  for (std::size_t i = 0; i < c.samples.size() && !differs; ++i) differs = !(c.samples[i].term == a.samples[i].term);
  CHECK(differs);
}

TEST_CASE("a fixed term") {
  OracleConfig cfg;
  cfg.samples = 30;
  const StateTerm t = pa().parse_term("choice(pa_5_5(par(x, x), zero), pref_b(y))");
  const auto s = oracle_compare(pa(), t, cfg);
  CHECK(s.violations == 0);
  for (const auto& x : s.samples) CHECK(x.term == t);
}

TEST_CASE("everything skipped is an error") {
  OracleConfig cfg;
  cfg.samples = 5;
  cfg.limits = {1, 100};
  cfg.operators = {"zero", "pref_a"};
  CHECK(error_kind([&] { oracle_compare(pa(), pa().parse_term("pref_a(x)"), cfg); }) ==
        ErrorKind::all_samples_skipped);
}

TEST_CASE("generator configuration") {
  OracleConfig cfg;
  cfg.operators = {"pref_a"};
  CHECK(error_kind([&] { TermGenerator(pa(), cfg); }) == ErrorKind::invalid_argument);
  cfg.operators = {"nope"};
  CHECK(error_kind([&] { TermGenerator(pa(), cfg); }) == ErrorKind::invalid_argument);
  cfg.operators = {"zero", "pref_a", "pref_b"};
  cfg.max_depth = 2;
  TermGenerator g(pa(), cfg);
  for (int i = 0; i < 50; ++i) {
    const auto t = g.closed(2);
    CHECK(t.is_closed());
    CHECK(t.depth() <= 3);
    CHECK(g.mutate(t).is_closed());
  }
}
