#include <benchmark/benchmark.h>

#include "xsynth/oracle.hpp"
#include "xsynth/product.hpp"
#include "xsynth/search.hpp"

using namespace xsynth;

namespace {

Program random_program(Domain d, uint64_t seed) {
  const OpcodeSampler sampler(OpWeights{}, OpcodeSet::full());
  Rng rng(seed);
  return init_random(d, 2, ProgramKind::Transformer, sampler, rng);
}

// Scoring a 30-line program over a full synthesis suite is the inner loop
// of every chain step.
void BM_BatchEvaluate(benchmark::State &state) {
  const auto d = static_cast<Domain>(state.range(0));
  const TestSuite suite = gen_suite(OpId::Add, d, SuitePolicy::synthesis_defaults(), 1);
  const Transformer t{random_program(d, 2), std::nullopt};
  BatchEvaluator ev;
  std::size_t rows = 0;
  for (const WidthGroup &g : suite.groups)
    rows += g.inputs.size;
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate(t, suite, ev));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * rows));
}
BENCHMARK(BM_BatchEvaluate)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_ScalarEval(benchmark::State &state) {
  const Transformer t{random_program(Domain::KnownBits, 3), std::nullopt};
  Rng rng(4);
  const std::vector<AbstractValue> in = {sample(Domain::KnownBits, 64, rng), sample(Domain::KnownBits, 64, rng)};
  for (auto _ : state)
    benchmark::DoNotOptimize(eval(t, in));
}
BENCHMARK(BM_ScalarEval);

void BM_BestTransformer(benchmark::State &state) {
  const auto w = static_cast<unsigned>(state.range(0));
  Rng rng(5);
  std::vector<std::vector<AbstractValue>> inputs;
  for (int i = 0; i < 64; ++i)
    inputs.push_back({sample(Domain::KnownBits, w, rng), sample(Domain::KnownBits, w, rng)});
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(best_transformer(OpId::Mul, inputs[i++ % inputs.size()]));
}
BENCHMARK(BM_BestTransformer)->Arg(4)->Arg(6)->Arg(8);

void BM_McmcChain(benchmark::State &state) {
  const TestSuite suite = gen_suite(OpId::And, Domain::KnownBits, SuitePolicy::synthesis_defaults(), 1);
  const SuiteOutputs g = top_outputs(suite);
  const CaseMask imprecise = imprecise_subset(suite, g);
  const ScoringContext ctx = make_context(suite, g, imprecise);
  const OpcodeSampler sampler(OpWeights{}, OpcodeSet::full());
  SearchConfig cfg;
  cfg.n_step = static_cast<unsigned>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(++seed);
    CandidateKind kind = CandidateKind::Plain;
    Candidate init = init_for_kind(kind, {}, Domain::KnownBits, 2, sampler, cfg, rng);
    benchmark::DoNotOptimize(mcmc_run(kind, std::move(init), ctx, cfg, sampler, rng));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * state.range(0)));
}
BENCHMARK(BM_McmcChain)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Reduce(benchmark::State &state) {
  Rng rng(6);
  std::vector<ProductValue> values;
  for (int i = 0; i < 256; ++i)
    values.push_back({sample(Domain::KnownBits, 64, rng), sample(Domain::URange, 64, rng)});
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(reduce(values[i++ % values.size()]));
}
BENCHMARK(BM_Reduce);

} // namespace
BENCHMARK_MAIN();
