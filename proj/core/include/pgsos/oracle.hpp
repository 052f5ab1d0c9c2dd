#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pgsos/denotation.hpp"
#include "pgsos/semantics.hpp"
#include "pgsos/spec.hpp"

namespace pgsos {

/// Empirical check that d(s1(t), s2(t)) <= da([[t]], e) on random samples,
/// where e(x) = d(s1(x), s2(x)).
struct OracleConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  /// Operator nesting of generated terms.
  std::size_t max_depth = 3;
  std::vector<std::string> vars = {"x", "y"};
  /// Operators to draw from; empty means every declared operator.
  std::vector<std::string> operators;
  /// Generation attempts per requested sample before giving up.
  std::size_t attempts_per_sample = 20;
  ExplorationLimits limits = {2000, 10000};
  FixpointConfig fixpoint = {};
};

enum class SampleStatus { ok, distance_one, truncated };

using ClosedSubstitution = std::map<std::string, StateTerm>;

struct OracleSample {
  StateTerm term;
  ClosedSubstitution sigma1;
  ClosedSubstitution sigma2;
  ProcessDistance e;
  Rational distance;
  Rational bound;
  SampleStatus status = SampleStatus::ok;

  bool violation() const { return status == SampleStatus::ok && distance > bound; }
  Rational gap() const { return bound - distance; }
};

struct OracleSummary {
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  std::size_t attempts = 0;
  std::vector<OracleSample> samples;  // status ok only
  std::size_t skipped_distance_one = 0;
  std::size_t skipped_truncated = 0;
  std::size_t violations = 0;
  std::optional<Rational> max_gap;
  std::optional<Rational> min_gap;
};

/// Random closed / open terms over the configured operators.
class TermGenerator {
 public:
  /// Throws Error(invalid_argument) if there is no constant to end a closed
  /// term with, or an operator is undeclared.
  TermGenerator(const SpecDocument& doc, const OracleConfig& config);

  StateTerm closed(std::size_t depth);
  StateTerm open(std::size_t depth);
  /// A nearby closed term: a replaced subterm, a swapped operator of the same
  /// arity, or occasionally the term itself.
  StateTerm mutate(const StateTerm& t);

 private:
  StateTerm generate(std::size_t depth, bool with_vars);
  std::size_t pick(std::size_t n);

  std::vector<std::pair<std::string, std::size_t>> ops_;
  std::vector<std::string> constants_;
  std::vector<std::string> vars_;
  std::size_t max_depth_;
  std::mt19937_64 rng_;
};

/// Fills e, distance and status; the bound is left at 0. Only variables free
/// in `t` count towards e.
OracleSample measure_sample(TransitionEngine& engine, const StateTerm& t, const ClosedSubstitution& sigma1,
                            const ClosedSubstitution& sigma2, const ExplorationLimits& limits = {});

/// measure_sample plus the denotational bound.
OracleSample evaluate_sample(const SpecDocument& doc, const StateTerm& t, const ClosedSubstitution& sigma1,
                             const ClosedSubstitution& sigma2, const OracleConfig& config = {});

/// Random terms. Throws Error(all_samples_skipped) if no sample survives.
OracleSummary oracle_compare(const SpecDocument& doc, const OracleConfig& config = {});
/// Fixed term, random substitutions.
OracleSummary oracle_compare(const SpecDocument& doc, const StateTerm& t, const OracleConfig& config = {});

}  // namespace pgsos
