#include "pgsos/oracle.hpp"

#include <algorithm>

#include "pgsos/metric.hpp"

namespace pgsos {

TermGenerator::TermGenerator(const SpecDocument& doc, const OracleConfig& config)
    : vars_(config.vars), max_depth_(config.max_depth), rng_(config.seed) {
  if (config.operators.empty()) {
    ops_ = doc.sig.operators();
  } else {
    for (const auto& op : config.operators) {
      const auto n = doc.sig.arity(op);
      if (!n) throw Error(ErrorKind::invalid_argument, "undeclared operator '" + op + "'");
      ops_.emplace_back(op, *n);
    }
  }
  for (const auto& [op, n] : ops_) {
    if (n == 0) constants_.push_back(op);
  }
  if (constants_.empty()) throw Error(ErrorKind::invalid_argument, "no constant to build closed terms from");
}

std::size_t TermGenerator::pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

StateTerm TermGenerator::generate(std::size_t depth, bool with_vars) {
  const std::size_t leaves = constants_.size() + (with_vars ? vars_.size() : 0);
  // Stop early now and then so shallow terms show up too.
  if (depth == 0 || pick(4) == 0) {
    const std::size_t k = pick(leaves);
    if (k < constants_.size()) return StateTerm::apply(constants_[k]);
    return StateTerm::variable(vars_[k - constants_.size()]);
  }
  const auto& [op, n] = ops_[pick(ops_.size())];
  std::vector<StateTerm> args;
  for (std::size_t i = 0; i < n; ++i) args.push_back(generate(depth - 1, with_vars));
  return StateTerm::apply(op, std::move(args));
}

StateTerm TermGenerator::closed(std::size_t depth) { return generate(depth, false); }
StateTerm TermGenerator::open(std::size_t depth) { return generate(depth, true); }

StateTerm TermGenerator::mutate(const StateTerm& t) {
  switch (pick(6)) {
    case 0:
      return t;
    case 1:
      return closed(max_depth_);
    case 2: {
      std::vector<std::string> same;
      for (const auto& [op, n] : ops_) {
        if (n == t.args().size() && op != t.name()) same.push_back(op);
      }
      if (!same.empty()) return StateTerm::apply(same[pick(same.size())], t.args());
      break;
    }
    default:
      break;
  }
  if (t.args().empty()) return closed(max_depth_ > 0 ? max_depth_ - 1 : 0);
  auto args = t.args();
  const std::size_t i = pick(args.size());
  args[i] = mutate(args[i]);
  return StateTerm::apply(t.name(), std::move(args));
}

namespace {

std::optional<Rational> closed_distance(TransitionEngine& engine, const StateTerm& a, const StateTerm& b,
                                        const ExplorationLimits& limits) {
  // Equal terms are still explored so the state limit applies uniformly.
  try {
    const auto frag = explore_fragment(engine, {a, b}, limits);
    const auto r = bisim_distance(frag, *frag.index_of(a), *frag.index_of(b));
    return r.table.at(*frag.index_of(a), *frag.index_of(b));
  } catch (const ExplorationError&) {
    return std::nullopt;
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::no_convergence) return std::nullopt;
    throw;
  }
}

Substitution as_substitution(const ClosedSubstitution& sigma) {
  Substitution s;
  for (const auto& [name, term] : sigma) s.bind(Var::state(name), term);
  return s;
}

}  // namespace

OracleSample measure_sample(TransitionEngine& engine, const StateTerm& t, const ClosedSubstitution& sigma1,
                            const ClosedSubstitution& sigma2, const ExplorationLimits& limits) {
  OracleSample s{t, sigma1, sigma2, {}, Rational(0), Rational(0), SampleStatus::ok};
  for (const auto& v : free_vars(t)) {
    const auto i1 = sigma1.find(v.name);
    const auto i2 = sigma2.find(v.name);
    if (i1 == sigma1.end() || i2 == sigma2.end()) {
      throw Error(ErrorKind::invalid_argument, "substitution does not close variable '" + v.name + "'");
    }
    const auto d = closed_distance(engine, i1->second, i2->second, limits);
    if (!d) {
      s.status = SampleStatus::truncated;
      return s;
    }
    if (*d == Rational(1)) {
      s.status = SampleStatus::distance_one;
      return s;
    }
    s.e.set(v, *d);
  }
  const auto d = closed_distance(engine, substitute(t, as_substitution(sigma1)), substitute(t, as_substitution(sigma2)),
                                 limits);
  if (!d) {
    s.status = SampleStatus::truncated;
    return s;
  }
  s.distance = *d;
  return s;
}

OracleSample evaluate_sample(const SpecDocument& doc, const StateTerm& t, const ClosedSubstitution& sigma1,
                             const ClosedSubstitution& sigma2, const OracleConfig& config) {
  TransitionEngine engine(doc);
  auto s = measure_sample(engine, t, sigma1, sigma2, config.limits);
  if (s.status == SampleStatus::ok) s.bound = bound_distance(doc, t, s.e, config.fixpoint);
  return s;
}

namespace {

OracleSummary run(const SpecDocument& doc, const OracleConfig& config, const std::optional<StateTerm>& fixed) {
  TermGenerator gen(doc, config);
  TransitionEngine engine(doc);
  OracleSummary out;
  out.seed = config.seed;
  out.requested = config.samples;
  const std::size_t max_attempts = config.samples * std::max<std::size_t>(config.attempts_per_sample, 1);
  while (out.samples.size() < config.samples && out.attempts < max_attempts) {
    ++out.attempts;
    const StateTerm t = fixed ? *fixed : gen.open(config.max_depth);
    ClosedSubstitution s1, s2;
    for (const auto& v : config.vars) {
      s1.emplace(v, gen.closed(config.max_depth));
      s2.emplace(v, gen.mutate(s1.at(v)));
    }
    auto sample = measure_sample(engine, t, s1, s2, config.limits);
    switch (sample.status) {
      case SampleStatus::ok:
        out.samples.push_back(std::move(sample));
        break;
      case SampleStatus::distance_one:
        ++out.skipped_distance_one;
        break;
      case SampleStatus::truncated:
        ++out.skipped_truncated;
        break;
    }
  }
  if (out.samples.empty()) {
    throw Error(ErrorKind::all_samples_skipped,
                "all " + std::to_string(out.attempts) + " samples were skipped (" +
                    std::to_string(out.skipped_distance_one) + " with a variable at distance 1, " +
                    std::to_string(out.skipped_truncated) + " truncated)");
  }

  // One fixed point for every sampled term.
  std::vector<AnyTerm> queries;
  for (const auto& s : out.samples) queries.emplace_back(s.term);
  const DenotationEngine denot(doc, config.fixpoint);
  const auto result = lfp_denotations(denot, queries);
  for (auto& s : out.samples) {
    s.bound = bound_distance(result, s.term, s.e);
    if (s.violation()) ++out.violations;
    const Rational gap = s.gap();
    if (!out.max_gap || gap > *out.max_gap) out.max_gap = gap;
    if (!out.min_gap || gap < *out.min_gap) out.min_gap = gap;
  }
  return out;
}

}  // namespace

OracleSummary oracle_compare(const SpecDocument& doc, const OracleConfig& config) {
  return run(doc, config, std::nullopt);
}

OracleSummary oracle_compare(const SpecDocument& doc, const StateTerm& t, const OracleConfig& config) {
  return run(doc, config, t);
}

}  // namespace pgsos
