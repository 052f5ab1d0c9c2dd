#include "doctest.h"
#include "oracles.hpp"
#include "pgsos/linear_program.hpp"

using namespace pgsos;
using oracle::q;

namespace {

/// Minimum over all vertices of {x >= 0 : constraints} in two variables,
/// found by intersecting every pair of boundary lines.
std::optional<Rational> vertex_minimum(const LinearProgram& lp) {
  struct Line {
    Rational a, b, c;  // a x + b y = c
  };
  std::vector<Line> lines = {{q(1), q(0), q(0)}, {q(0), q(1), q(0)}};
  for (const auto& k : lp.constraints) {
    Line l{q(0), q(0), k.rhs};
    for (const auto& [v, w] : k.terms) (v == 0 ? l.a : l.b) += w;
    lines.push_back(l);
  }
  std::optional<Rational> best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Rational det = lines[i].a * lines[j].b - lines[i].b * lines[j].a;
      if (det.is_zero()) continue;
      const Rational x = (lines[i].c * lines[j].b - lines[i].b * lines[j].c) / det;
      const Rational y = (lines[i].a * lines[j].c - lines[i].c * lines[j].a) / det;
      if (!is_feasible_point(lp, {x, y})) continue;
      const Rational v = lp.objective[0] * x + lp.objective[1] * y;
      if (!best || v < *best) best = v;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("a small optimum") {
  LinearProgram lp;
  const auto x = lp.add_var(), y = lp.add_var();
  lp.add({{x, q(1)}, {y, q(1)}}, Relation::geq, q(1));
  lp.add({{x, q(1)}, {y, q(-1)}}, Relation::leq, q(1, 2));
  lp.objective = {q(2), q(3)};
  const auto r = solve(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == q(9, 4));
  CHECK(r.x == std::vector<Rational>{q(3, 4), q(1, 4)});
  CHECK(is_feasible_point(lp, r.x));
}

TEST_CASE("infeasibility comes with a Farkas certificate") {
  LinearProgram lp;
  const auto x = lp.add_var(), y = lp.add_var();
  lp.add({{x, q(1)}, {y, q(1)}}, Relation::leq, q(1));
  lp.add({{x, q(1)}, {y, q(1)}}, Relation::geq, q(2));
  const auto r = solve(lp);
  REQUIRE(r.status == LpStatus::infeasible);
  CHECK(is_farkas_certificate(lp, r.certificate));
  CHECK_FALSE(is_farkas_certificate(lp, std::vector<Rational>(2, q(0))));
}

TEST_CASE("unbounded objective") {
  LinearProgram lp;
  const auto x = lp.add_var();
  lp.add({{x, q(1)}}, Relation::geq, q(1));
  lp.objective = {q(-1)};
  CHECK(solve(lp).status == LpStatus::unbounded);
}

TEST_CASE("redundant equalities and degenerate vertices") {
  LinearProgram lp;
  const auto x = lp.add_var(), y = lp.add_var(), z = lp.add_var();
  lp.add({{x, q(1)}, {y, q(1)}, {z, q(1)}}, Relation::eq, q(1));
  lp.add({{x, q(2)}, {y, q(2)}, {z, q(2)}}, Relation::eq, q(2));
  lp.add({{x, q(1)}}, Relation::leq, q(0));
  lp.objective = {q(1), q(2), q(3)};
  const auto r = solve(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == q(2));
}

TEST_CASE("random two-variable programs agree with vertex enumeration") {
  oracle::Random rnd(5);
  auto coeff = [&] { return Rational(static_cast<long>(rnd.below(9)) - 4, static_cast<long>(1 + rnd.below(3))); };
  int optimal = 0, infeasible = 0;
  for (int i = 0; i < 300; ++i) {
    LinearProgram lp;
    lp.add_var();
    lp.add_var();
    for (std::size_t k = 0, n = 1 + rnd.below(4); k < n; ++k) {
      const Relation rel = rnd.below(2) ? Relation::leq : Relation::geq;
      lp.add({{0, coeff()}, {1, coeff()}}, rel, coeff());
    }
    // Keep the region bounded so a vertex optimum exists whenever feasible.
    lp.add({{0, q(1)}, {1, q(1)}}, Relation::leq, q(5));
    lp.objective = {coeff(), coeff()};
    const auto r = solve(lp);
    const auto want = vertex_minimum(lp);
    CAPTURE(i);
    if (!want) {
      CHECK(r.status == LpStatus::infeasible);
      CHECK(is_farkas_certificate(lp, r.certificate));
      ++infeasible;
    } else {
      REQUIRE(r.status == LpStatus::optimal);
      CHECK(r.value == *want);
      CHECK(is_feasible_point(lp, r.x));
      ++optimal;
    }
  }
  CHECK(optimal > 50);
  CHECK(infeasible > 10);
}
