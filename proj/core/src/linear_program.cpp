#include "pgsos/linear_program.hpp"

#include <optional>

#include "pgsos/error.hpp"

namespace pgsos {

namespace {

class Tableau {
 public:
  // Rows are the normalized constraints (rhs >= 0). Columns: original
  // variables, then one slack/surplus per inequality, then one artificial per
  // row, then the right-hand side.
  explicit Tableau(const LinearProgram& lp) : lp_(lp) {
    const std::size_t m = lp.constraints.size();
    n_orig_ = lp.num_vars;
    std::size_t n_slack = 0;
    for (const auto& c : lp.constraints) n_slack += c.relation != Relation::eq;
    n_real_ = n_orig_ + n_slack;
    width_ = n_real_ + m;
    rows_.assign(m, std::vector<mpq_class>(width_ + 1));
    sign_.assign(m, 1);
    basis_.resize(m);

    std::size_t slack = n_orig_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = lp.constraints[i];
      auto& row = rows_[i];
      for (const auto& [j, a] : c.terms) {
        if (j >= n_orig_) throw Error(ErrorKind::invalid_argument, "constraint refers to unknown variable");
        row[j] += a.get();
      }
      if (c.relation == Relation::leq) row[slack++] = 1;
      if (c.relation == Relation::geq) row[slack++] = -1;
      row[width_] = c.rhs.get();
      if (sgn(row[width_]) < 0) {
        sign_[i] = -1;
        for (auto& v : row) v = -v;
      }
      row[n_real_ + i] = 1;
      basis_[i] = n_real_ + i;
    }
    allowed_.assign(width_, true);
  }

  // Runs the simplex method on cost vector `cost` (length width_). Returns
  // false if unbounded.
  bool optimize(const std::vector<mpq_class>& cost) {
    reduced_.assign(width_ + 1, 0);
    for (std::size_t j = 0; j <= width_; ++j) {
      mpq_class r = j < width_ ? cost[j] : mpq_class(0);
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][j]) != 0) r -= cost[basis_[i]] * rows_[i][j];
      }
      reduced_[j] = r;
    }
    while (true) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < width_; ++j) {
        if (allowed_[j] && sgn(reduced_[j]) < 0) {
          entering = j;
          break;
        }
      }
      if (!entering) return true;

      std::optional<std::size_t> leaving;
      mpq_class best;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& a = rows_[i][*entering];
        if (sgn(a) <= 0) continue;
        mpq_class ratio = rows_[i][width_] / a;
        if (!leaving || ratio < best || (ratio == best && basis_[i] < basis_[*leaving])) {
          leaving = i;
          best = ratio;
        }
      }
      if (!leaving) return false;
      pivot(*leaving, *entering);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = rows_[r];
    const mpq_class p = prow[c];
    for (auto& v : prow) {
      if (sgn(v) != 0) v /= p;
    }
    auto eliminate = [&](std::vector<mpq_class>& row) {
      const mpq_class f = row[c];
      if (sgn(f) == 0) return;
      for (std::size_t j = 0; j <= width_; ++j) {
        if (sgn(prow[j]) != 0) row[j] -= f * prow[j];
      }
    };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != r) eliminate(rows_[i]);
    }
    if (!reduced_.empty()) eliminate(reduced_);
    basis_[r] = c;
  }

  bool is_artificial(std::size_t j) const { return j >= n_real_; }

  LpResult run() {
    LpResult result;
    const std::size_t m = rows_.size();

    std::vector<mpq_class> cost1(width_, 0);
    for (std::size_t i = 0; i < m; ++i) cost1[n_real_ + i] = 1;
    optimize(cost1);  // phase one is bounded below by zero

    if (sgn(reduced_[width_]) != 0) {
      // The reduced cost of artificial i is 1 - y_i for the phase-one duals y.
      result.status = LpStatus::infeasible;
      result.certificate.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        const mpq_class y = 1 - reduced_[n_real_ + i];
        result.certificate[i] = Rational(mpq_class(-y * sign_[i]));
      }
      return result;
    }

    // Drive artificials out of the basis; a row with no real nonzero is
    // redundant and dropped.
    for (std::size_t i = 0; i < rows_.size();) {
      if (!is_artificial(basis_[i])) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n_real_; ++j) {
        if (sgn(rows_[i][j]) != 0) {
          col = j;
          break;
        }
      }
      if (col) {
        pivot(i, *col);
        ++i;
      } else {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t j = n_real_; j < width_; ++j) allowed_[j] = false;

    std::vector<mpq_class> cost2(width_, 0);
    for (std::size_t j = 0; j < lp_.objective.size() && j < n_orig_; ++j) cost2[j] = lp_.objective[j].get();
    if (!optimize(cost2)) {
      result.status = LpStatus::unbounded;
      return result;
    }

    result.status = LpStatus::optimal;
    result.x.assign(n_orig_, Rational(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (basis_[i] < n_orig_) result.x[basis_[i]] = Rational(rows_[i][width_]);
    }
    Rational value(0);
    for (std::size_t j = 0; j < lp_.objective.size() && j < n_orig_; ++j) value += lp_.objective[j] * result.x[j];
    result.value = value;
    return result;
  }

 private:
  const LinearProgram& lp_;
  std::size_t n_orig_ = 0;
  std::size_t n_real_ = 0;
  std::size_t width_ = 0;
  std::vector<std::vector<mpq_class>> rows_;
  std::vector<mpq_class> reduced_;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
};

}  // namespace

LpResult solve(const LinearProgram& lp) {
  Tableau tableau(lp);
  return tableau.run();
}

bool is_feasible_point(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.num_vars) return false;
  for (const auto& v : x) {
    if (v < Rational(0)) return false;
  }
  for (const auto& c : lp.constraints) {
    Rational lhs(0);
    for (const auto& [j, a] : c.terms) lhs += a * x[j];
    const bool ok = c.relation == Relation::eq    ? lhs == c.rhs
                    : c.relation == Relation::leq ? lhs <= c.rhs
                                                  : lhs >= c.rhs;
    if (!ok) return false;
  }
  return true;
}

bool is_farkas_certificate(const LinearProgram& lp, const std::vector<Rational>& y) {
  if (y.size() != lp.constraints.size()) return false;
  std::vector<Rational> combo(lp.num_vars, Rational(0));
  Rational rhs(0);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const auto& c = lp.constraints[k];
    if (c.relation == Relation::leq && y[k] < Rational(0)) return false;
    if (c.relation == Relation::geq && y[k] > Rational(0)) return false;
    for (const auto& [j, a] : c.terms) combo[j] += y[k] * a;
    rhs += y[k] * c.rhs;
  }
  for (const auto& v : combo) {
    if (v < Rational(0)) return false;
  }
  return rhs < Rational(0);
}

}  // namespace pgsos
