#include <benchmark/benchmark.h>

#include "mgram/corpus.hpp"
#include "mgram/index.hpp"
#include "mgram/lpms.hpp"
#include "mgram/matcher.hpp"
#include "mgram/model.hpp"
#include "mgram/solvers.hpp"
#include "mgram/synthgen.hpp"

using namespace mgram;

namespace {

Corpus make_corpus(std::size_t records) {
  CorpusSpec spec;
  spec.record_count = records;
  spec.min_record_len = 80;
  spec.max_record_len = 120;
  spec.distribution = SupportDistribution::kNormal;
  spec.sd = 100;
  spec.gram_count = 200;
  spec.seed = 3;
  return gen_corpus(spec);
}

std::vector<RegexQuery> make_queries(const Corpus& corpus, std::size_t n) {
  WorkloadSpec ws;
  ws.sample_fraction = 1.0;
  ws.max_queries = n;
  ws.seed = 5;
  return gen_workload(corpus, ws).queries;
}

void BM_CountSupports(benchmark::State& state) {
  const Corpus corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  std::vector<std::string> grams;
  for (std::size_t r = 0; r < 20; ++r) {
    const std::string& text = corpus.record(r);
    for (std::size_t len = 2; len <= 4; ++len) grams.push_back(text.substr(0, len));
  }
  for (auto _ : state) benchmark::DoNotOptimize(count_supports(corpus, grams));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.total_chars()));
}
BENCHMARK(BM_CountSupports)->Arg(1000)->Arg(4000);

void BM_EnumerateGrams(benchmark::State& state) {
  const Corpus corpus = make_corpus(1000);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_grams(corpus, 2, 3).size());
}
BENCHMARK(BM_EnumerateGrams)->Unit(benchmark::kMillisecond);

void BM_SolveLp(benchmark::State& state) {
  const Corpus corpus = make_corpus(2000);
  const auto queries = make_queries(corpus, static_cast<std::size_t>(state.range(0)));
  const SelectionProblem p = build_problem(corpus, expand_workload(queries));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(p).objective);
  state.counters["rows"] = static_cast<double>(p.rows.size());
  state.counters["cols"] = static_cast<double>(p.num_cols());
}
BENCHMARK(BM_SolveLp)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SelectLpmsR(benchmark::State& state) {
  const Corpus corpus = make_corpus(2000);
  const auto sqs = expand_workload(make_queries(corpus, 100));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_lpms(corpus, sqs, SelectionMode::kLpmsR).grams.size());
  }
}
BENCHMARK(BM_SelectLpmsR)->Unit(benchmark::kMillisecond);

void BM_EvaluateWorkload(benchmark::State& state) {
  const Corpus corpus = make_corpus(4000);
  const auto queries = make_queries(corpus, 100);
  const auto sel = select_lpms(corpus, expand_workload(queries), SelectionMode::kLpmsD);
  const IndexArtifact index = build_index(corpus, sel);
  const bool use_index = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_all(use_index ? &index : nullptr, corpus, queries).size());
  }
  state.SetLabel(use_index ? "index" : "full scan");
}
BENCHMARK(BM_EvaluateWorkload)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
