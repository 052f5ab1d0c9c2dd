#include <limits>

#include "doctest.h"
#include "errors.hpp"
#include "oracles.hpp"
#include "pgsos/multiplicity.hpp"

using namespace pgsos;
using oracle::error_kind;
using oracle::q;

namespace {

const Var x = Var::state("x");
const Var y = Var::state("y");

Multiplicity mult(std::initializer_list<std::pair<Var, Count>> xs) {
  Multiplicity m;
  for (const auto& [v, c] : xs) m.set(v, c);
  return m;
}

std::map<std::string, std::optional<unsigned>> plain(const Multiplicity& m) {
  std::map<std::string, std::optional<unsigned>> out;
  for (const auto& [v, c] : m.entries()) {
    out[v.name] = c.is_infinite() ? std::nullopt : std::optional<unsigned>(static_cast<unsigned>(c.value()));
  }
  return out;
}

std::map<std::string, mpq_class> plain(const ProcessDistance& e) {
  std::map<std::string, mpq_class> out;
  for (const auto& [v, r] : e.entries()) out[v.name] = r.get();
  return out;
}

}  // namespace

TEST_CASE("counts") {
  const Count inf = Count::infinity();
  CHECK(Count(2) + Count(3) == Count(5));
  CHECK(inf + Count(3) == inf);
  CHECK(Count(0) * inf == Count(0));
  CHECK(Count(2) * inf == inf);
  CHECK(Count(7) < inf);
  CHECK(error_kind([] { return Count(std::numeric_limits<std::uint64_t>::max()) + Count(1); }).has_value());
  CHECK(error_kind([] { return Count(std::uint64_t{1} << 40) * Count(std::uint64_t{1} << 40); }).has_value());
}

TEST_CASE("multiplicities") {
  const auto m = mult({{x, 2}, {y, Count::infinity()}});
  CHECK(m.to_string() == "{x:2, y:inf}");
  CHECK(mult({{x, 0}}).is_zero());
  CHECK(mult({{x, 1}}).leq(m));
  CHECK_FALSE(m.leq(mult({{x, 5}})));
  CHECK(m_sum(mult({{x, 1}}), mult({{x, 2}, {y, 1}})) == mult({{x, 3}, {y, 1}}));
  CHECK(Multiplicity::of({x, y}, 2) == mult({{x, 2}, {y, 2}}));
}

TEST_CASE("m_dot substitutes one variable") {
  oracle::Random r(20);
  for (int i = 0; i < 100; ++i) {
    const auto a = r.multiplicity(), b = r.multiplicity();
    const auto d = m_dot(a, y, b);
    for (const Var& v : {x, y}) CHECK(d.get(v) == a.get(y) * b.get(v));
  }
}

TEST_CASE("probabilistic multiplicities validate their masses") {
  CHECK(error_kind([] { ProbMultiplicity::from_masses({{Multiplicity{}, q(1, 2)}}); }) ==
        ErrorKind::invalid_distribution);
  CHECK(error_kind([] {
          ProbMultiplicity::from_masses({{Multiplicity{}, q(3, 2)}, {Multiplicity::unit(Var::state("x")), q(-1, 2)}});
        }) == ErrorKind::invalid_distribution);
  const auto p = ProbMultiplicity::from_masses({{mult({{x, 2}}), q(1, 2)}, {Multiplicity{}, q(1, 2)}});
  CHECK(p.to_string() == "1/2@{} + 1/2@{x:2}");
  CHECK(ProbMultiplicity{}.is_dirac());
  CHECK(ProbMultiplicity{}.point().is_zero());
}

TEST_CASE("composition draws the operator once and the arguments independently") {
  oracle::Random r(21);
  const Var x1 = Var::state("x1"), x2 = Var::state("x2");
  for (int i = 0; i < 60; ++i) {
    // Operator over x1, x2; arguments over x, y.
    std::map<Multiplicity, Rational> op_masses;
    const auto ws = r.masses(1 + r.below(2));
    for (const auto& w : ws) {
      Multiplicity m;
      m.set(x1, Count(r.below(3)));
      m.set(x2, Count(r.below(3)));
      op_masses[m] += Rational(w);
    }
    const auto op = ProbMultiplicity::from_masses(op_masses);
    const auto a1 = r.prob_multiplicity(), a2 = r.prob_multiplicity();
    std::map<Multiplicity, Rational> want;
    for (const auto& [m, p] : op.masses()) {
      for (const auto& [m1, p1] : a1.masses()) {
        for (const auto& [m2, p2] : a2.masses()) {
          Multiplicity sum;
          for (const Var& v : {x, y}) sum.set(v, m.get(x1) * m1.get(v) + m.get(x2) * m2.get(v));
          want[sum] += p * p1 * p2;
        }
      }
    }
    CHECK(compose(op, {x1, x2}, {&a1, &a2}) == ProbMultiplicity::from_masses(want));
  }
}

TEST_CASE("weighting is the expected copy count") {
  oracle::Random r(22);
  for (int i = 0; i < 100; ++i) {
    const auto p = r.prob_multiplicity();
    const auto w = weighting(p);
    for (const Var& v : {x, y}) {
      bool inf = false;
      Rational sum(0);
      for (const auto& [m, mass] : p.masses()) {
        const Count c = m.get(v);
        if (c.is_infinite()) {
          inf = true;
        } else {
          sum += mass * Rational(static_cast<long>(c.value()));
        }
      }
      const auto got = weight_at(w, v);
      CHECK(got.is_infinite() == inf);
      if (!inf) CHECK(got.value() == sum);
    }
  }
  // Sub-distributions are renormalised.
  const auto w = weighting(std::map<Multiplicity, Rational>{{mult({{x, 2}}), q(1, 4)}});
  CHECK(weight_at(w, x) == ExtRational(q(2)));
  CHECK(weighting(std::map<Multiplicity, Rational>{}).empty());
}

TEST_CASE("distance approximations against the written-out formula") {
  oracle::Random r(23);
  for (int i = 0; i < 200; ++i) {
    const auto m = r.multiplicity();
    const auto e = r.distance();
    CHECK(dda(m, e).get() == oracle::naive_dda(plain(m), plain(e)));
  }
  for (int i = 0; i < 100; ++i) {
    const auto p = r.prob_multiplicity();
    const auto e = r.distance();
    mpq_class want = 0;
    for (const auto& [m, mass] : p.masses()) want += mass.get() * oracle::naive_dda(plain(m), plain(e));
    CHECK(pda(p, e).get() == want);
  }
  ProcessDistance zero_e;
  CHECK(dda(mult({{x, Count::infinity()}}), zero_e) == q(0));
  ProcessDistance tenth;
  tenth.set(x, q(1, 10));
  CHECK(dda(mult({{x, Count::infinity()}}), tenth) == q(1));
  CHECK(dda(mult({{x, 2}}), tenth) == q(19, 100));
}

TEST_CASE("da is the maximum over generators") {
  const auto p1 = ProbMultiplicity::from_masses({{mult({{x, 2}}), q(1, 2)}, {Multiplicity{}, q(1, 2)}});
  const auto p2 = ProbMultiplicity::dirac(mult({{y, 1}}));
  ProcessDistance e;
  e.set(x, q(1, 10));
  e.set(y, q(1, 5));
  CHECK(da(genset_normalize({p1, p2}), e) == max(pda(p1, e), pda(p2, e)));
}

TEST_CASE("process distances stay below 1") {
  ProcessDistance e;
  CHECK(error_kind([&] { e.set(x, q(1)); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([&] { e.set(x, q(-1, 10)); }) == ErrorKind::invalid_argument);
  CHECK(e.get(y) == q(0));
}

TEST_CASE("p_leq compares through matchings") {
  const auto one = ProbMultiplicity::dirac(mult({{x, 1}}));
  const auto split = ProbMultiplicity::from_masses({{mult({{x, 2}}), q(1, 2)}, {Multiplicity{}, q(1, 2)}});
  // The split has the same expected copies as one copy, without being
  // pointwise below it.
  Matching w;
  CHECK(p_leq(split, one, &w));
  CHECK(is_leq_witness(split, one, w));
  CHECK_FALSE(p_leq(one, split));
  CHECK(p_leq(ProbMultiplicity{}, split));
  CHECK(p_leq(ProbMultiplicity::dirac(mult({{x, 3}})), ProbMultiplicity::dirac(mult({{x, Count::infinity()}}))));
  CHECK_FALSE(p_leq(ProbMultiplicity::dirac(mult({{x, Count::infinity()}})), ProbMultiplicity::dirac(mult({{x, 3}}))));
}

TEST_CASE("p_leq is reflexive and transitive; Dirac pairs are pointwise") {
  oracle::Random r(24);
  for (int i = 0; i < 100; ++i) {
    const auto a = r.prob_multiplicity();
    const auto b = r.raise(a);
    const auto c = r.raise(b);
    Matching w;
    CHECK(p_leq(a, a));
    REQUIRE(p_leq(a, b, &w));
    CHECK(is_leq_witness(a, b, w));
    CHECK(p_leq(b, c));
    CHECK(p_leq(a, c));
    const auto m1 = r.multiplicity(), m2 = r.multiplicity();
    CHECK(p_leq(ProbMultiplicity::dirac(m1), ProbMultiplicity::dirac(m2)) == m1.leq(m2));
  }
}

TEST_CASE("generator sets keep one representative of each maximal class") {
  const auto small = ProbMultiplicity::dirac(mult({{x, 1}}));
  const auto big = ProbMultiplicity::dirac(mult({{x, 2}}));
  const auto other = ProbMultiplicity::dirac(mult({{y, 1}}));
  const auto split = ProbMultiplicity::from_masses({{mult({{x, 2}}), q(1, 2)}, {Multiplicity{}, q(1, 2)}});
  CHECK(genset_normalize({small, big}) == GenSet::single(big));
  CHECK(genset_normalize({small, other}).generators().size() == 2);
  // split lies strictly below small and is dropped.
  CHECK(genset_normalize({small, split}) == GenSet::single(small));
  CHECK(error_kind([] { genset_normalize({}); }) == ErrorKind::empty_genset);
  CHECK(genset_leq(GenSet::single(small), genset_union(GenSet::single(other), GenSet::single(big))));
  CHECK_FALSE(genset_leq(GenSet::single(big), GenSet::single(small)));
  CHECK_FALSE(genset_equivalent(GenSet::single(small), GenSet::single(split)));
  CHECK(genset_equivalent(GenSet::single(small), genset_union(GenSet::single(small), GenSet::single(split))));
  CHECK(GenSet{}.to_string() == "1@{}");
}

TEST_CASE("sup_approx bounds every input and is exact on Diracs") {
  oracle::Random r(25);
  for (int i = 0; i < 100; ++i) {
    std::vector<ProbMultiplicity> ps;
    bool diracs = true;
    for (std::size_t k = 0, n = 1 + r.below(3); k < n; ++k) {
      ps.push_back(r.below(2) ? r.prob_multiplicity() : ProbMultiplicity::dirac(r.multiplicity()));
      diracs = diracs && ps.back().is_dirac();
    }
    bool exact = false;
    const auto s = sup_approx(ps, &exact);
    CHECK(s.is_dirac());
    CHECK(exact == diracs);
    for (const auto& p : ps) CHECK(p_leq(p, s));
  }
}
