#include "pgsos/metric.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pgsos/linear_program.hpp"

namespace pgsos {

PseudometricTable::PseudometricTable(std::vector<StateTerm> states) {
  auto index = std::make_shared<Index>();
  index->states = std::move(states);
  for (std::size_t i = 0; i < index->states.size(); ++i) index->lookup.emplace(index->states[i], i);
  const std::size_t n = index->states.size();
  cells_.assign(n * (n - (n ? 1 : 0)) / 2, Rational(0));
  index_ = std::move(index);
}

std::optional<std::size_t> PseudometricTable::index_of(const StateTerm& t) const {
  if (const auto it = index_->lookup.find(t); it != index_->lookup.end()) return it->second;
  return std::nullopt;
}

const Rational& PseudometricTable::at(std::size_t i, std::size_t j) const {
  static const Rational zero(0);
  if (i == j) return zero;
  if (i < j) std::swap(i, j);
  return cells_[cell(i, j)];
}

void PseudometricTable::set(std::size_t i, std::size_t j, Rational value) {
  if (i == j) {
    if (!value.is_zero()) throw Error(ErrorKind::invalid_argument, "diagonal entries are fixed at 0");
    return;
  }
  if (i < j) std::swap(i, j);
  cells_[cell(i, j)] = std::move(value);
}

const Rational& PseudometricTable::operator()(const StateTerm& a, const StateTerm& b) const {
  const auto i = index_of(a);
  const auto j = index_of(b);
  if (!i) throw Error(ErrorKind::unindexed_state, "state " + a.to_string() + " is not in the table");
  if (!j) throw Error(ErrorKind::unindexed_state, "state " + b.to_string() + " is not in the table");
  return at(*i, *j);
}

bool PseudometricTable::is_pseudometric(std::string* why) const {
  const std::size_t n = size();
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const Rational& v = at(i, j);
      if (v < Rational(0) || v > Rational(1)) {
        return fail("d(" + std::to_string(i) + "," + std::to_string(j) + ") = " + v.to_string() +
                    " outside [0,1]");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (at(i, k) > at(i, j) + at(j, k)) {
          return fail("triangle violated at " + std::to_string(i) + "," + std::to_string(j) + "," +
                      std::to_string(k));
        }
      }
    }
  }
  // Zero diagonal and symmetry hold by construction of the storage.
  return true;
}

bool PseudometricTable::leq(const PseudometricTable& other) const {
  if (cells_.size() != other.cells_.size()) return false;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c] > other.cells_[c]) return false;
  }
  return true;
}

namespace {

// North-west corner rule: some feasible plan, used when every plan costs the
// same.
std::vector<std::tuple<std::size_t, std::size_t, Rational>> northwest(const IndexedDistribution& p,
                                                                       const IndexedDistribution& q) {
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> plan;
  std::size_t i = 0;
  std::size_t j = 0;
  Rational left = p.empty() ? Rational(0) : p[0].second;
  Rational right = q.empty() ? Rational(0) : q[0].second;
  while (i < p.size() && j < q.size()) {
    const Rational m = min(left, right);
    if (!m.is_zero()) plan.emplace_back(i, j, m);
    left -= m;
    right -= m;
    if (left.is_zero() && ++i < p.size()) left = p[i].second;
    if (right.is_zero() && ++j < q.size()) right = q[j].second;
  }
  return plan;
}

}  // namespace

IndexedTransport transport_matrix(const IndexedDistribution& p, const IndexedDistribution& q,
                                  const std::vector<std::vector<Rational>>& cost) {
  IndexedTransport out;
  bool uniform = true;
  for (const auto& row : cost) {
    for (const auto& c : row) uniform = uniform && c == cost[0][0];
  }
  if (p.size() == 1 || q.size() == 1 || uniform) {
    out.plan = northwest(p, q);
    out.value = Rational(0);
    for (const auto& [i, j, m] : out.plan) out.value += m * cost[i][j];
    return out;
  }

  LinearProgram lp;
  lp.num_vars = p.size() * q.size();
  lp.objective.resize(lp.num_vars);
  auto var = [&](std::size_t i, std::size_t j) { return i * q.size() + j; };
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::vector<std::pair<std::size_t, Rational>> row;
    for (std::size_t j = 0; j < q.size(); ++j) {
      row.emplace_back(var(i, j), Rational(1));
      lp.objective[var(i, j)] = cost[i][j];
    }
    lp.add(std::move(row), Relation::eq, p[i].second);
  }
  for (std::size_t j = 0; j < q.size(); ++j) {
    std::vector<std::pair<std::size_t, Rational>> col;
    for (std::size_t i = 0; i < p.size(); ++i) col.emplace_back(var(i, j), Rational(1));
    lp.add(std::move(col), Relation::eq, q[j].second);
  }
  const LpResult r = solve(lp);
  if (r.status != LpStatus::optimal) {
    throw Error(ErrorKind::invalid_distribution, "transport problem has no optimum; masses do not balance");
  }
  out.value = r.value;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (!r.x[var(i, j)].is_zero()) out.plan.emplace_back(i, j, r.x[var(i, j)]);
    }
  }
  return out;
}

KantorovichResult kantorovich(const PseudometricTable& d, const FiniteDistribution& pi,
                              const FiniteDistribution& rho) {
  auto indexed = [&](const FiniteDistribution& dist) {
    IndexedDistribution out;
    for (const auto& [t, m] : dist.masses()) {
      const auto i = d.index_of(t);
      if (!i) throw Error(ErrorKind::unindexed_state, "state " + t.to_string() + " is not in the table");
      out.emplace_back(*i, m);
    }
    return out;
  };
  const IndexedDistribution p = indexed(pi);
  const IndexedDistribution q = indexed(rho);
  const auto solved = transport(p, q, [&](std::size_t i, std::size_t j) { return d.at(i, j); });

  KantorovichResult out;
  out.value = solved.value;
  for (const auto& [i, j, m] : solved.plan) {
    out.plan.entries.emplace_back(d.states()[p[i].first], d.states()[q[j].first], m);
  }
  return out;
}

namespace {

// Transitions of a fragment with targets translated to state indices.
struct IndexedFragment {
  struct Moves {
    std::vector<std::string> actions;  // sorted, distinct
    std::vector<std::vector<IndexedDistribution>> targets;  // parallel to actions
  };
  std::vector<Moves> moves;

  explicit IndexedFragment(const ReachableFragment& frag) : moves(frag.size()) {
    if (!frag.complete) {
      throw Error(ErrorKind::truncated_fragment, "the fragment is truncated; exact distances need all transitions");
    }
    for (std::size_t s = 0; s < frag.size(); ++s) {
      auto& mv = moves[s];
      for (const auto& tr : frag.transitions[s]) {
        if (mv.actions.empty() || mv.actions.back() != tr.action) {
          mv.actions.push_back(tr.action);
          mv.targets.emplace_back();
        }
        IndexedDistribution dist;
        for (const auto& [t, m] : tr.target.masses()) dist.emplace_back(frag.index.at(t), m);
        mv.targets.back().push_back(std::move(dist));
      }
    }
  }

  Rational step(std::size_t i, std::size_t j, const PseudometricTable& d) const {
    if (i == j) return Rational(0);
    const auto& a = moves[i];
    const auto& b = moves[j];
    if (a.actions != b.actions) return Rational(1);
    Rational result(0);
    auto k = [&](const IndexedDistribution& p, const IndexedDistribution& q) {
      return transport(p, q, [&](std::size_t u, std::size_t v) { return d.at(u, v); }).value;
    };
    for (std::size_t n = 0; n < a.actions.size() && result < Rational(1); ++n) {
      result = max(result, hausdorff(a.targets[n], b.targets[n], k));
    }
    return result;
  }

  // Pairs (i > j) whose distance B may read when computing d(i, j).
  void dependencies(std::size_t i, std::size_t j, std::vector<std::pair<std::size_t, std::size_t>>& out) const {
    const auto& a = moves[i];
    const auto& b = moves[j];
    if (a.actions != b.actions) return;
    for (std::size_t n = 0; n < a.actions.size(); ++n) {
      for (const auto& p : a.targets[n]) {
        for (const auto& q : b.targets[n]) {
          for (const auto& [u, pm] : p) {
            for (const auto& [v, qm] : q) {
              if (u != v) out.emplace_back(std::max(u, v), std::min(u, v));
            }
          }
        }
      }
    }
  }
};

MetricResult iterate_pairs(const ReachableFragment& frag, const IndexedFragment& view,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                           const MetricOptions& options) {
  MetricResult result;
  result.table = PseudometricTable(frag.states);
  result.cyclic = frag.has_cycle();

  std::size_t n = 0;
  while (true) {
    if (n == options.max_iterations) {
      if (options.iterate) {
        result.iterations = n;
        return result;
      }
      throw Error(ErrorKind::no_convergence, "bisimulation distance did not stabilize within " +
                                                 std::to_string(options.max_iterations) + " iterations");
    }
    PseudometricTable next = result.table;
    bool changed = false;
    for (const auto& [i, j] : pairs) {
      const Rational& old = result.table.at(i, j);
      if (old == Rational(1)) continue;  // the chain is increasing and bounded by 1
      Rational value = view.step(i, j, result.table);
      if (value != old) {
        changed = true;
        next.set(i, j, std::move(value));
      }
    }
    if (!changed) {
      // d_n = B(d_n) and d_n lies below every fixed point, so it is the least.
      result.iterations = n;
      result.exact = true;
      return result;
    }
    result.table = std::move(next);
    ++n;
  }
}

}  // namespace

PseudometricTable bisim_step(const ReachableFragment& frag, const PseudometricTable& d) {
  const IndexedFragment view(frag);
  if (d.size() != frag.size()) throw Error(ErrorKind::invalid_argument, "table and fragment sizes differ");
  PseudometricTable next(frag.states);
  for (std::size_t i = 0; i < frag.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) next.set(i, j, view.step(i, j, d));
  }
  return next;
}

MetricResult bisim_metric_lfp(const ReachableFragment& frag, const MetricOptions& options) {
  const IndexedFragment view(frag);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < frag.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) pairs.emplace_back(i, j);
  }
  return iterate_pairs(frag, view, pairs, options);
}

MetricResult bisim_distance(const ReachableFragment& frag, std::size_t a, std::size_t b,
                            const MetricOptions& options) {
  const IndexedFragment view(frag);
  if (a >= frag.size() || b >= frag.size()) throw Error(ErrorKind::unindexed_state, "state index out of range");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::pair<std::size_t, std::size_t>> work;
  if (a != b) work.emplace_back(std::max(a, b), std::min(a, b));
  while (!work.empty()) {
    const auto pr = work.back();
    work.pop_back();
    if (!seen.insert(pr).second) continue;
    pairs.push_back(pr);
    view.dependencies(pr.first, pr.second, work);
  }
  std::sort(pairs.begin(), pairs.end());
  return iterate_pairs(frag, view, pairs, options);
}

std::optional<std::pair<std::size_t, std::size_t>> enabled_action_mismatch(const ReachableFragment& frag,
                                                                           const PseudometricTable& d) {
  for (std::size_t i = 0; i < frag.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (d.at(i, j) < Rational(1) && frag.enabled(i) != frag.enabled(j)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace pgsos
