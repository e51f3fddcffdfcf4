// Serial reference against the OpenMP path for the hot kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "factcheck/features_debate.hpp"
#include "factcheck/kernels.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"
#include "synthetic.hpp"

using namespace fc;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

kernels::Policy policy_arg(const benchmark::State& state) {
  return state.range(1) ? kernels::Policy::kParallel : kernels::Policy::kSerial;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vec(n * n, 1), b = random_vec(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    kernels::matmul(a.data(), b.data(), c.data(), n, n, n, policy_arg(state));
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_Matmul)->ArgsProduct({{64, 256}, {0, 1}})->ArgNames({"n", "parallel"});

void BM_RbfGram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 64;
  const auto x = random_vec(n * d, 3);
  std::vector<double> k(n * n);
  for (auto _ : state) {
    kernels::rbf_gram(x.data(), n, d, 0.1, k.data(), policy_arg(state));
    benchmark::DoNotOptimize(k.data());
  }
}
BENCHMARK(BM_RbfGram)->ArgsProduct({{256, 1024}, {0, 1}})->ArgNames({"n", "parallel"});

void BM_DebateFeatures(benchmark::State& state) {
  static const auto debates = testing::make_debates({2, static_cast<std::size_t>(state.range(0)), 0.3, 5});
  static const auto vectors = testing::make_vectors();
  static const auto lex = testing::lexicons();
  std::vector<std::vector<std::string>> docs;
  for (const auto& d : debates) {
    for (const auto& s : d.sentences) docs.push_back(text::words(s.text));
  }
  LdaOptions lo;
  lo.topics = 20;
  lo.iterations = 50;
  const auto topics = train_lda(docs, lo);
  const auto vocab = Vocabulary::fit(docs, 998);
  const auto refs = reference_sentences(debates);
  DebateResources res;
  res.lexicons = &lex;
  res.vocabulary = &vocab;
  res.vectors = &vectors;
  res.topics = &topics;
  res.training_refs = refs;
  for (auto _ : state) {
    auto m = extract_debate_features(debates, res, {}, policy_arg(state));
    benchmark::DoNotOptimize(m.values.data());
  }
}
BENCHMARK(BM_DebateFeatures)->ArgsProduct({{200}, {0, 1}})->ArgNames({"sentences", "parallel"});

}  // namespace

BENCHMARK_MAIN();
