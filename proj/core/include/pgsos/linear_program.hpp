#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pgsos/rational.hpp"

namespace pgsos {

enum class Relation { leq, eq, geq };

struct LinearConstraint {
  std::vector<std::pair<std::size_t, Rational>> terms;  // (variable, coefficient)
  Relation relation = Relation::eq;
  Rational rhs;
};

/// minimize objective . x  subject to constraints, x >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<LinearConstraint> constraints;
  std::vector<Rational> objective;  // empty: pure feasibility

  std::size_t add_var() { return num_vars++; }
  void add(std::vector<std::pair<std::size_t, Rational>> terms, Relation rel, Rational rhs) {
    constraints.push_back({std::move(terms), rel, std::move(rhs)});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational value;
  std::vector<Rational> x;
  /// When infeasible: one multiplier per constraint proving it (see
  /// is_farkas_certificate).
  std::vector<Rational> certificate;
};

/// Two-phase primal simplex over exact rationals with Bland's rule, so it
/// always terminates.
LpResult solve(const LinearProgram& lp);

bool is_feasible_point(const LinearProgram& lp, const std::vector<Rational>& x);

/// Checks y proves infeasibility: y_k >= 0 on <= rows, y_k <= 0 on >= rows,
/// sum_k y_k a_k >= 0 componentwise and sum_k y_k b_k < 0.
bool is_farkas_certificate(const LinearProgram& lp, const std::vector<Rational>& y);

}  // namespace pgsos
