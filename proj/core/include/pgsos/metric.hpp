#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pgsos/rational.hpp"
#include "pgsos/semantics.hpp"
#include "pgsos/terms.hpp"

namespace pgsos {

/// Symmetric [0,1]-valued table over a fixed list of states. Only the strict
/// lower triangle is stored; the diagonal is 0.
class PseudometricTable {
 public:
  PseudometricTable() = default;
  /// All-zero table over `states`.
  explicit PseudometricTable(std::vector<StateTerm> states);

  std::size_t size() const { return index_->states.size(); }
  const std::vector<StateTerm>& states() const { return index_->states; }
  std::optional<std::size_t> index_of(const StateTerm& t) const;

  const Rational& at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, Rational value);
  /// Throws Error(unindexed_state) if either term is not in the table.
  const Rational& operator()(const StateTerm& a, const StateTerm& b) const;

  /// Zero diagonal, symmetry, range [0,1] and triangle inequality, exactly.
  /// On failure `why` names the offending entries.
  bool is_pseudometric(std::string* why = nullptr) const;

  /// Pointwise order.
  bool leq(const PseudometricTable& other) const;
  friend bool operator==(const PseudometricTable& a, const PseudometricTable& b) {
    return a.cells_ == b.cells_;
  }

 private:
  struct Index {
    std::vector<StateTerm> states;
    std::unordered_map<StateTerm, std::size_t> lookup;
  };
  static std::size_t cell(std::size_t i, std::size_t j) { return i * (i - 1) / 2 + j; }

  std::shared_ptr<const Index> index_ = std::make_shared<const Index>();
  std::vector<Rational> cells_;
};

struct TransportPlan {
  std::vector<std::tuple<StateTerm, StateTerm, Rational>> entries;  // positive masses only
};

struct KantorovichResult {
  Rational value;
  TransportPlan plan;
};

/// Minimal expected distance over all matchings of pi and rho, with an
/// optimal matching. Throws Error(unindexed_state) if a support state is not
/// in `d`.
KantorovichResult kantorovich(const PseudometricTable& d, const FiniteDistribution& pi,
                              const FiniteDistribution& rho);

/// Same problem on index-level data: supports as (index, mass) lists and a
/// cost callback on indices. The plan lists (position in p, position in q,
/// mass) for positive masses.
using IndexedDistribution = std::vector<std::pair<std::size_t, Rational>>;
struct IndexedTransport {
  Rational value;
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> plan;
};
template <class Cost>
IndexedTransport transport(const IndexedDistribution& p, const IndexedDistribution& q, Cost&& cost);
IndexedTransport transport_matrix(const IndexedDistribution& p, const IndexedDistribution& q,
                                  const std::vector<std::vector<Rational>>& cost);

/// max of the two directed sup-inf values of `k` between the sets, with
/// inf over nothing = 1 and sup over nothing = 0.
template <class A, class B, class K>
Rational hausdorff(const std::vector<A>& left, const std::vector<B>& right, K&& k) {
  std::vector<std::vector<Rational>> values(left.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    values[i].reserve(right.size());
    for (const auto& r : right) values[i].push_back(k(left[i], r));
  }
  Rational result(0);
  for (std::size_t i = 0; i < left.size(); ++i) {
    Rational inf(1);
    for (std::size_t j = 0; j < right.size(); ++j) inf = min(inf, values[i][j]);
    result = max(result, inf);
  }
  for (std::size_t j = 0; j < right.size(); ++j) {
    Rational inf(1);
    for (std::size_t i = 0; i < left.size(); ++i) inf = min(inf, values[i][j]);
    result = max(result, inf);
  }
  return result;
}

/// One application of the bisimulation functional on a complete fragment:
/// B(d)(s,t) = max over actions of the Hausdorff lifting of the Kantorovich
/// lifting of d between the derivative sets. Throws
/// Error(truncated_fragment).
PseudometricTable bisim_step(const ReachableFragment& frag, const PseudometricTable& d);

struct MetricOptions {
  /// Stop after this many steps and report a lower bound instead of failing.
  bool iterate = false;
  std::size_t max_iterations = 1000;
};

struct MetricResult {
  PseudometricTable table;
  std::size_t iterations = 0;
  /// The chain reached d_{n+1} = d_n, so the table is the least fixed point.
  bool exact = false;
  bool cyclic = false;
};

/// Least fixed point of B over the whole fragment, iterating from 0. In exact
/// mode throws Error(no_convergence) if the chain has not stabilized within
/// max_iterations; in iterate mode returns the last iterate (exact = false
/// unless it stabilized).
MetricResult bisim_metric_lfp(const ReachableFragment& frag, const MetricOptions& options = {});

/// Like bisim_metric_lfp but only iterates the pairs the distance between
/// states `a` and `b` depends on. Entries outside that set are left at 0.
MetricResult bisim_distance(const ReachableFragment& frag, std::size_t a, std::size_t b,
                            const MetricOptions& options = {});

/// Remark on bisimulation metrics: states at distance < 1 enable the same
/// actions. Returns the first offending pair, if any.
std::optional<std::pair<std::size_t, std::size_t>> enabled_action_mismatch(
    const ReachableFragment& frag, const PseudometricTable& d);

template <class Cost>
IndexedTransport transport(const IndexedDistribution& p, const IndexedDistribution& q, Cost&& cost) {
  std::vector<std::vector<Rational>> matrix(p.size(), std::vector<Rational>(q.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) matrix[i][j] = cost(p[i].first, q[j].first);
  }
  return transport_matrix(p, q, matrix);
}

}  // namespace pgsos
