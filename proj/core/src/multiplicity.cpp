#include "pgsos/multiplicity.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "pgsos/linear_program.hpp"

namespace pgsos {

Count operator+(Count a, Count b) {
  if (a.infinite_ || b.infinite_) return Count::infinity();
  if (a.value_ > std::numeric_limits<std::uint64_t>::max() - b.value_) {
    throw Error(ErrorKind::invalid_argument, "copy count overflow");
  }
  return Count(a.value_ + b.value_);
}

Count operator*(Count a, Count b) {
  if (a.is_zero() || b.is_zero()) return Count(0);
  if (a.infinite_ || b.infinite_) return Count::infinity();
  if (a.value_ > std::numeric_limits<std::uint64_t>::max() / b.value_) {
    throw Error(ErrorKind::invalid_argument, "copy count overflow");
  }
  return Count(a.value_ * b.value_);
}

Multiplicity Multiplicity::of(const std::vector<Var>& vars, Count n) {
  Multiplicity m;
  for (const auto& v : vars) m.set(v, n);
  return m;
}

Count Multiplicity::get(const Var& v) const {
  const auto it = entries_.find(v);
  return it == entries_.end() ? Count(0) : it->second;
}

void Multiplicity::set(const Var& v, Count n) {
  if (n.is_zero()) {
    entries_.erase(v);
  } else {
    entries_.insert_or_assign(v, n);
  }
}

bool Multiplicity::leq(const Multiplicity& other) const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.second <= other.get(e.first); });
}

std::string Multiplicity::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, n] : entries_) {
    if (!first) out += ", ";
    first = false;
    out += v.name + ":" + n.to_string();
  }
  return out + "}";
}

std::strong_ordering operator<=>(const Multiplicity& a, const Multiplicity& b) {
  return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                                                b.entries_.end());
}

Multiplicity m_sum(const Multiplicity& a, const Multiplicity& b) {
  Multiplicity out = a;
  for (const auto& [v, n] : b.entries()) out.set(v, a.get(v) + n);
  return out;
}

Multiplicity m_dot(const Multiplicity& a, const Var& y, const Multiplicity& b) {
  const Count factor = a.get(y);
  Multiplicity out;
  if (factor.is_zero()) return out;
  for (const auto& [v, n] : b.entries()) out.set(v, factor * n);
  return out;
}

Multiplicity m_max(const Multiplicity& a, const Multiplicity& b) {
  Multiplicity out = a;
  for (const auto& [v, n] : b.entries()) out.set(v, std::max(a.get(v), n));
  return out;
}

ProbMultiplicity ProbMultiplicity::dirac(Multiplicity m) {
  ProbMultiplicity p;
  p.masses_ = {{std::move(m), Rational(1)}};
  return p;
}

ProbMultiplicity ProbMultiplicity::from_masses(std::map<Multiplicity, Rational> masses) {
  Rational total(0);
  for (auto it = masses.begin(); it != masses.end();) {
    if (it->second < Rational(0)) throw Error(ErrorKind::invalid_distribution, "negative mass");
    total += it->second;
    it = it->second.is_zero() ? masses.erase(it) : std::next(it);
  }
  if (total != Rational(1)) {
    throw Error(ErrorKind::invalid_distribution, "masses sum to " + total.to_string() + ", not 1");
  }
  ProbMultiplicity p;
  p.masses_ = std::move(masses);
  return p;
}

std::string ProbMultiplicity::to_string() const {
  std::string out;
  for (const auto& [m, q] : masses_) {
    if (!out.empty()) out += " + ";
    out += q.to_string() + "@" + m.to_string();
  }
  return out;
}

bool operator<(const ProbMultiplicity& a, const ProbMultiplicity& b) {
  return std::lexicographical_compare(
      a.masses_.begin(), a.masses_.end(), b.masses_.begin(), b.masses_.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second < y.second;
      });
}

ProbMultiplicity p_sum(const ProbMultiplicity& a, const ProbMultiplicity& b) { return p_lift(a, b, m_sum); }

ProbMultiplicity p_dot(const ProbMultiplicity& a, const Var& y, const ProbMultiplicity& b) {
  return p_lift(a, b, [&](const Multiplicity& m1, const Multiplicity& m2) { return m_dot(m1, y, m2); });
}

ProbMultiplicity p_convex(const std::vector<std::pair<Rational, const ProbMultiplicity*>>& parts) {
  std::map<Multiplicity, Rational> out;
  for (const auto& [q, p] : parts) {
    for (const auto& [m, r] : p->masses()) out[m] += q * r;
  }
  return ProbMultiplicity::from_masses(std::move(out));
}

ProbMultiplicity compose(const ProbMultiplicity& op, const std::vector<Var>& vars,
                         const std::vector<const ProbMultiplicity*>& args) {
  if (vars.size() != args.size()) throw Error(ErrorKind::invalid_argument, "compose: arity mismatch");
  std::map<Multiplicity, Rational> out;
  for (const auto& [m, q] : op.masses()) {
    // sum over i of m(x_i) * m_i with the m_i independent
    ProbMultiplicity acc;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const Count factor = m.get(vars[i]);
      if (factor.is_zero()) continue;
      acc = p_lift(acc, *args[i], [&](const Multiplicity& a, const Multiplicity& b) {
        return m_sum(a, m_dot(Multiplicity::of({vars[i]}, factor), vars[i], b));
      });
    }
    for (const auto& [r, w] : acc.masses()) out[r] += q * w;
  }
  return ProbMultiplicity::from_masses(std::move(out));
}

Weighting weighting(const std::map<Multiplicity, Rational>& sub) {
  Weighting out;
  Rational total(0);
  for (const auto& [m, q] : sub) total += q;
  if (total.is_zero()) return out;
  for (const auto& [m, q] : sub) {
    if (q.is_zero()) continue;
    for (const auto& [v, n] : m.entries()) {
      auto& slot = out[v];
      if (slot.is_infinite()) continue;
      if (n.is_infinite()) {
        slot = ExtRational::infinity();
      } else {
        slot = ExtRational(slot.value() + q * Rational(static_cast<long>(n.value())) / total);
      }
    }
  }
  return out;
}

Weighting weighting(const ProbMultiplicity& p) { return weighting(p.masses()); }

ExtRational weight_at(const Weighting& w, const Var& v) {
  const auto it = w.find(v);
  return it == w.end() ? ExtRational(Rational(0)) : it->second;
}

namespace {

ExtRational as_ext(Count n) {
  return n.is_infinite() ? ExtRational::infinity() : ExtRational(Rational(static_cast<long>(n.value())));
}

bool weighting_below(const Weighting& w, const Multiplicity& m) {
  return std::all_of(w.begin(), w.end(), [&](const auto& e) { return e.second <= as_ext(m.get(e.first)); });
}

}  // namespace

bool p_leq(const ProbMultiplicity& a, const ProbMultiplicity& b, Matching* witness) {
  if (a.is_dirac() && b.is_dirac()) {
    if (!a.point().leq(b.point())) return false;
    if (witness) *witness = {{a.point(), b.point(), Rational(1)}};
    return true;
  }
  if (b.is_dirac()) {
    if (!weighting_below(weighting(a), b.point())) return false;
    if (witness) {
      witness->clear();
      for (const auto& [m, q] : a.masses()) witness->emplace_back(m, b.point(), q);
    }
    return true;
  }

  // Variables omega(r, c) >= 0 with the marginals of a (rows) and b
  // (columns). A row with an infinite entry at x can only go to a column
  // that is infinite at x.
  const std::vector<std::pair<Multiplicity, Rational>> rows(a.masses().begin(), a.masses().end());
  const std::vector<std::pair<Multiplicity, Rational>> cols(b.masses().begin(), b.masses().end());
  auto compatible = [](const Multiplicity& r, const Multiplicity& c) {
    return std::all_of(r.entries().begin(), r.entries().end(),
                       [&](const auto& e) { return !e.second.is_infinite() || c.get(e.first).is_infinite(); });
  };

  LinearProgram lp;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> var;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (compatible(rows[i].first, cols[j].first)) var[{i, j}] = lp.add_var();
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (const auto it = var.find({i, j}); it != var.end()) terms.emplace_back(it->second, Rational(1));
    }
    if (terms.empty()) return false;
    lp.add(std::move(terms), Relation::eq, rows[i].second);
  }
  std::set<Var> vars;
  for (const auto& [m, q] : rows) {
    for (const auto& [v, n] : m.entries()) vars.insert(v);
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (const auto it = var.find({i, j}); it != var.end()) terms.emplace_back(it->second, Rational(1));
    }
    if (terms.empty()) return false;
    lp.add(std::move(terms), Relation::eq, cols[j].second);

    // sum_i omega(i, j) (r_i(x) - c_j(x)) <= 0 wherever c_j(x) is finite
    const Multiplicity& c = cols[j].first;
    for (const auto& x : vars) {
      const Count cx = c.get(x);
      if (cx.is_infinite()) continue;
      std::vector<std::pair<std::size_t, Rational>> weighted;
      bool binding = false;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto it = var.find({i, j});
        if (it == var.end()) continue;
        const Count rx = rows[i].first.get(x);
        const Rational diff = Rational(static_cast<long>(rx.value())) - Rational(static_cast<long>(cx.value()));
        binding = binding || diff > Rational(0);
        if (!diff.is_zero()) weighted.emplace_back(it->second, diff);
      }
      if (binding) lp.add(std::move(weighted), Relation::leq, Rational(0));
    }
  }

  const LpResult r = solve(lp);
  if (r.status != LpStatus::optimal) return false;
  if (witness) {
    witness->clear();
    for (const auto& [ij, k] : var) {
      if (!r.x[k].is_zero()) witness->emplace_back(rows[ij.first].first, cols[ij.second].first, r.x[k]);
    }
  }
  return true;
}

bool is_leq_witness(const ProbMultiplicity& a, const ProbMultiplicity& b, const Matching& w) {
  std::map<Multiplicity, Rational> row_sum;
  std::map<Multiplicity, std::map<Multiplicity, Rational>> columns;
  for (const auto& [r, c, q] : w) {
    if (q < Rational(0)) return false;
    row_sum[r] += q;
    columns[c][r] += q;
  }
  for (auto it = row_sum.begin(); it != row_sum.end();) {
    it = it->second.is_zero() ? row_sum.erase(it) : std::next(it);
  }
  if (row_sum != a.masses()) return false;
  std::map<Multiplicity, Rational> col_sum;
  for (const auto& [c, sub] : columns) {
    Rational total(0);
    for (const auto& [r, q] : sub) total += q;
    if (!total.is_zero()) col_sum[c] = total;
    if (!weighting_below(weighting(sub), c)) return false;
  }
  return col_sum == b.masses();
}

GenSet GenSet::single(ProbMultiplicity p) {
  GenSet g;
  g.generators_ = {std::move(p)};
  return g;
}

std::string GenSet::to_string() const {
  std::string out;
  for (const auto& p : generators_) {
    if (!out.empty()) out += " | ";
    out += p.to_string();
  }
  return out;
}

GenSet genset_normalize(std::vector<ProbMultiplicity> ps) {
  if (ps.empty()) throw Error(ErrorKind::empty_genset, "a generator set needs at least one element");
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  // Drop p if it lies strictly below another element, or is equivalent to an
  // earlier one. Transitivity makes checking against all elements enough.
  std::vector<ProbMultiplicity> kept;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < ps.size() && !dominated; ++j) {
      if (i == j || !p_leq(ps[i], ps[j])) continue;
      dominated = j < i || !p_leq(ps[j], ps[i]);
    }
    if (!dominated) kept.push_back(ps[i]);
  }
  GenSet g;
  g.generators_ = std::move(kept);
  return g;
}

bool genset_leq(const GenSet& a, const GenSet& b) {
  return std::all_of(a.generators().begin(), a.generators().end(), [&](const ProbMultiplicity& p) {
    return std::any_of(b.generators().begin(), b.generators().end(),
                       [&](const ProbMultiplicity& q) { return p_leq(p, q); });
  });
}

bool genset_equivalent(const GenSet& a, const GenSet& b) {
  return a == b || (genset_leq(a, b) && genset_leq(b, a));
}

GenSet genset_union(const GenSet& a, const GenSet& b) {
  std::vector<ProbMultiplicity> all = a.generators();
  all.insert(all.end(), b.generators().begin(), b.generators().end());
  return genset_normalize(std::move(all));
}

ProbMultiplicity sup_approx(const std::vector<ProbMultiplicity>& ps, bool* exact) {
  if (ps.empty()) throw Error(ErrorKind::empty_genset, "sup of an empty set");
  Multiplicity top;
  bool all_dirac = true;
  for (const auto& p : ps) {
    all_dirac = all_dirac && p.is_dirac();
    for (const auto& [m, q] : p.masses()) top = m_max(top, m);
  }
  if (exact) *exact = all_dirac;
  return ProbMultiplicity::dirac(std::move(top));
}

void ProcessDistance::set(const Var& v, Rational value) {
  if (value < Rational(0) || value >= Rational(1)) {
    throw Error(ErrorKind::invalid_argument,
                "distance for " + v.name + " must lie in [0,1), got " + value.to_string());
  }
  if (value.is_zero()) {
    entries_.erase(v);
  } else {
    entries_.insert_or_assign(v, std::move(value));
  }
}

const Rational& ProcessDistance::get(const Var& v) const {
  static const Rational zero(0);
  const auto it = entries_.find(v);
  return it == entries_.end() ? zero : it->second;
}

std::string ProcessDistance::to_string() const {
  std::string out = "{";
  for (const auto& [v, r] : entries_) {
    if (out.size() > 1) out += ", ";
    out += v.name + ":" + r.to_string();
  }
  return out + "}";
}

Rational dda(const Multiplicity& m, const ProcessDistance& e) {
  Rational keep(1);
  for (const auto& [v, n] : m.entries()) {
    const Rational& ev = e.get(v);
    if (ev.is_zero()) continue;
    if (n.is_infinite()) return Rational(1);
    keep *= (Rational(1) - ev).pow(n.value());
  }
  return Rational(1) - keep;
}

Rational pda(const ProbMultiplicity& p, const ProcessDistance& e) {
  Rational out(0);
  for (const auto& [m, q] : p.masses()) out += q * dda(m, e);
  return out;
}

Rational da(const GenSet& g, const ProcessDistance& e) {
  Rational out(0);
  for (const auto& p : g.generators()) out = max(out, pda(p, e));
  return out;
}

}  // namespace pgsos
