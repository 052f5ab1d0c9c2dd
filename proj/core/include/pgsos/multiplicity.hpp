#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pgsos/error.hpp"
#include "pgsos/rational.hpp"
#include "pgsos/terms.hpp"

namespace pgsos {

/// A natural number or infinity. Arithmetic follows inf + n = inf,
/// 0 * inf = 0 and n * inf = inf for n >= 1. Finite overflow throws.
class Count {
 public:
  constexpr Count() = default;
  constexpr Count(std::uint64_t n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  static constexpr Count infinity() {
    Count c;
    c.infinite_ = true;
    return c;
  }

  bool is_infinite() const { return infinite_; }
  bool is_zero() const { return !infinite_ && value_ == 0; }
  /// Only meaningful when finite.
  std::uint64_t value() const { return value_; }
  std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

  friend Count operator+(Count a, Count b);
  friend Count operator*(Count a, Count b);
  friend bool operator==(const Count&, const Count&) = default;
  friend std::strong_ordering operator<=>(const Count& a, const Count& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }

 private:
  std::uint64_t value_ = 0;
  bool infinite_ = false;
};

/// Copy counts per variable; variables not stored count 0.
class Multiplicity {
 public:
  Multiplicity() = default;
  static Multiplicity unit(const Var& v) { return of({v}, 1); }
  /// n_V: n copies of every variable in `vars`.
  static Multiplicity of(const std::vector<Var>& vars, Count n);

  Count get(const Var& v) const;
  void set(const Var& v, Count n);
  const std::map<Var, Count>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  /// Pointwise order.
  bool leq(const Multiplicity& other) const;
  std::string to_string() const;

  friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
  friend std::strong_ordering operator<=>(const Multiplicity& a, const Multiplicity& b);

 private:
  std::map<Var, Count> entries_;
};

/// Pointwise sum.
Multiplicity m_sum(const Multiplicity& a, const Multiplicity& b);
/// (a .y b)(x) = a(y) * b(x).
Multiplicity m_dot(const Multiplicity& a, const Var& y, const Multiplicity& b);
/// Pointwise maximum.
Multiplicity m_max(const Multiplicity& a, const Multiplicity& b);

/// Non-negative rational or infinity.
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(Rational r) : value_(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  static ExtRational infinity() {
    ExtRational e;
    e.infinite_ = true;
    return e;
  }
  bool is_infinite() const { return infinite_; }
  const Rational& value() const { return value_; }
  std::string to_string() const { return infinite_ ? "inf" : value_.to_string(); }

  friend bool operator==(const ExtRational&, const ExtRational&) = default;
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }

 private:
  Rational value_;
  bool infinite_ = false;
};

/// Expected copy count per variable.
using Weighting = std::map<Var, ExtRational>;

/// Distribution over multiplicities with positive masses summing to 1.
class ProbMultiplicity {
 public:
  ProbMultiplicity() : masses_{{Multiplicity{}, Rational(1)}} {}
  static ProbMultiplicity dirac(Multiplicity m);
  /// Drops zero masses; throws Error(invalid_distribution) unless the masses
  /// are non-negative and sum to 1.
  static ProbMultiplicity from_masses(std::map<Multiplicity, Rational> masses);

  const std::map<Multiplicity, Rational>& masses() const { return masses_; }
  bool is_dirac() const { return masses_.size() == 1; }
  /// The single support point of a Dirac.
  const Multiplicity& point() const { return masses_.begin()->first; }
  std::string to_string() const;

  friend bool operator==(const ProbMultiplicity&, const ProbMultiplicity&) = default;
  friend bool operator<(const ProbMultiplicity& a, const ProbMultiplicity& b);

 private:
  std::map<Multiplicity, Rational> masses_;
};

/// Image of the product measure under op.
template <class Op>
ProbMultiplicity p_lift(const ProbMultiplicity& a, const ProbMultiplicity& b, Op&& op) {
  std::map<Multiplicity, Rational> out;
  for (const auto& [m1, q1] : a.masses()) {
    for (const auto& [m2, q2] : b.masses()) out[op(m1, m2)] += q1 * q2;
  }
  return ProbMultiplicity::from_masses(std::move(out));
}
ProbMultiplicity p_sum(const ProbMultiplicity& a, const ProbMultiplicity& b);
ProbMultiplicity p_dot(const ProbMultiplicity& a, const Var& y, const ProbMultiplicity& b);
/// Applies f to every support point, merging masses.
template <class F>
ProbMultiplicity p_map(const ProbMultiplicity& p, F&& f) {
  std::map<Multiplicity, Rational> out;
  for (const auto& [m, q] : p.masses()) out[f(m)] += q;
  return ProbMultiplicity::from_masses(std::move(out));
}
/// sum_i q_i * p_i.
ProbMultiplicity p_convex(const std::vector<std::pair<Rational, const ProbMultiplicity*>>& parts);

/// Composition of an operator denotation with argument denotations:
/// m is drawn once from `op`, the m_i independently from `args[i]`, and the
/// result is the sum over i of (m .vars[i] m_i).
ProbMultiplicity compose(const ProbMultiplicity& op, const std::vector<Var>& vars,
                         const std::vector<const ProbMultiplicity*>& args);

/// Weighting of a subdistribution: (1/|pi|) sum_m pi(m) m(x), all zero for
/// the empty subdistribution.
Weighting weighting(const std::map<Multiplicity, Rational>& sub);
Weighting weighting(const ProbMultiplicity& p);
/// Weighting as a value at one variable (0 if absent).
ExtRational weight_at(const Weighting& w, const Var& v);

/// A matching between two probabilistic multiplicities: (row point, column
/// point, mass).
using Matching = std::vector<std::tuple<Multiplicity, Multiplicity, Rational>>;

/// a below b: some matching sends a to b so that every column's weighting
/// lies below the column point. Decided exactly; `witness` receives the
/// matching when the answer is yes.
bool p_leq(const ProbMultiplicity& a, const ProbMultiplicity& b, Matching* witness = nullptr);

/// Checks a matching certifies a below b.
bool is_leq_witness(const ProbMultiplicity& a, const ProbMultiplicity& b, const Matching& w);

/// Downward-closed set of probabilistic multiplicities, represented by an
/// antichain of generators in canonical order.
class GenSet {
 public:
  /// {delta_0}
  GenSet() : generators_{ProbMultiplicity{}} {}
  static GenSet single(ProbMultiplicity p);

  const std::vector<ProbMultiplicity>& generators() const { return generators_; }
  std::string to_string() const;

  friend bool operator==(const GenSet&, const GenSet&) = default;

 private:
  friend GenSet genset_normalize(std::vector<ProbMultiplicity> ps);
  std::vector<ProbMultiplicity> generators_;
};

/// Keeps one representative of each maximal class. Throws
/// Error(empty_genset) for no input.
GenSet genset_normalize(std::vector<ProbMultiplicity> ps);
bool genset_leq(const GenSet& a, const GenSet& b);
/// Both directions hold.
bool genset_equivalent(const GenSet& a, const GenSet& b);
GenSet genset_union(const GenSet& a, const GenSet& b);

/// An upper bound of every input: the Dirac at the pointwise maximum over all
/// support points. It is the least upper bound when every input is a Dirac;
/// `exact` reports whether that was the case.
ProbMultiplicity sup_approx(const std::vector<ProbMultiplicity>& ps, bool* exact = nullptr);

/// Per-variable distances in [0,1); unlisted variables are at distance 0.
class ProcessDistance {
 public:
  ProcessDistance() = default;
  /// Throws Error(invalid_argument) for values outside [0,1).
  void set(const Var& v, Rational value);
  const Rational& get(const Var& v) const;
  const std::map<Var, Rational>& entries() const { return entries_; }
  std::string to_string() const;

 private:
  std::map<Var, Rational> entries_;
};

/// 1 - prod_x (1 - e(x))^m(x), with (1-e)^inf = 0 for e > 0 and 1 for e = 0.
Rational dda(const Multiplicity& m, const ProcessDistance& e);
/// sum_m p(m) dda(m, e).
Rational pda(const ProbMultiplicity& p, const ProcessDistance& e);
/// Maximum of pda over the generators.
Rational da(const GenSet& g, const ProcessDistance& e);

}  // namespace pgsos
