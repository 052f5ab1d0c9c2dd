#include <benchmark/benchmark.h>

#include <random>

#include "pgsos/continuity.hpp"
#include "pgsos/denotation.hpp"
#include "pgsos/metric.hpp"
#include "pgsos/spec.hpp"

using namespace pgsos;

namespace {

const SpecDocument& pa() {
  static const SpecDocument doc = parse_spec(read_file(PGSOS_SPECS_DIR "/pa.pgsos"));
  return doc;
}
const SpecDocument& ex() {
  static const SpecDocument doc = parse_spec(read_file(PGSOS_SPECS_DIR "/examples.pgsos"));
  return doc;
}

StateTerm chain(int k) {
  StateTerm t = StateTerm::apply("zero");
  for (int i = 0; i < k; ++i) t = StateTerm::apply(i % 2 ? "pref_b" : "pref_a", {t});
  return t;
}

FiniteDistribution spread(const std::vector<StateTerm>& states, std::mt19937_64& rng) {
  std::vector<long> parts(states.size(), 1);
  const long den = 4 * static_cast<long>(states.size());
  for (long left = den - static_cast<long>(states.size()); left > 0; --left) {
    ++parts[std::uniform_int_distribution<std::size_t>(0, states.size() - 1)(rng)];
  }
  std::map<StateTerm, Rational> m;
  for (std::size_t i = 0; i < states.size(); ++i) m[states[i]] = Rational(mpq_class(parts[i], den));
  return FiniteDistribution::from_masses(std::move(m));
}

// Random metric on n states: 1/2 + u/2 satisfies the triangle inequality.
void BM_Kantorovich(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::vector<StateTerm> states;
  for (int i = 0; i < 2 * n; ++i) states.push_back(chain(i));
  PseudometricTable d(states);
  std::mt19937_64 rng(5);
  for (std::size_t i = 1; i < states.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) d.set(i, j, Rational(mpq_class(16 + rng() % 17, 32)));
  }
  const std::vector<StateTerm> left(states.begin(), states.begin() + n), right(states.begin() + n, states.end());
  const auto pi = spread(left, rng), rho = spread(right, rng);
  for (auto _ : st) benchmark::DoNotOptimize(kantorovich(d, pi, rho));
  st.SetComplexityN(n);
}
BENCHMARK(BM_Kantorovich)->RangeMultiplier(2)->Range(2, 16)->Complexity();

void BM_MetricLfp(benchmark::State& st) {
  std::vector<StateTerm> roots;
  for (int i = 0; i < st.range(0); ++i) {
    roots.push_back(StateTerm::apply("pa_9_1", {chain(i + 1), chain(i)}));
    roots.push_back(StateTerm::apply("par", {chain(i), chain(i + 1)}));
  }
  const auto frag = explore_fragment(pa(), roots);
  for (auto _ : st) benchmark::DoNotOptimize(bisim_metric_lfp(frag));
  st.counters["states"] = static_cast<double>(frag.size());
}
BENCHMARK(BM_MetricLfp)->DenseRange(1, 4);

void BM_SynchronousDistance(benchmark::State& st) {
  const StateTerm a = pa().parse_term("par(AA, AA)"), b = pa().parse_term("par(A91, A91)");
  for (auto _ : st) {
    const auto frag = explore_fragment(pa(), {a, b});
    benchmark::DoNotOptimize(bisim_distance(frag, 0, 1));
  }
}
BENCHMARK(BM_SynchronousDistance);

void BM_Denotations(benchmark::State& st) {
  const SpecDocument& doc = st.range(0) ? ex() : pa();
  for (auto _ : st) benchmark::DoNotOptimize(lfp_denotations(doc, {}));
}
BENCHMARK(BM_Denotations)->Arg(0)->Arg(1);

void BM_ContinuityReport(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(ContinuityAnalyzer(ex()).reports());
}
BENCHMARK(BM_ContinuityReport);

}  // namespace
BENCHMARK_MAIN();
