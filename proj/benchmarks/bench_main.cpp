#include <benchmark/benchmark.h>

#include <string>
#include <unordered_map>
#include <vector>

#include "psmaudit/psmaudit.hpp"

namespace {

using namespace psmaudit;

// Zipf-weighted random lowercase/digit strings.
PasswordCorpus make_corpus(std::size_t distinct, std::uint64_t seed) {
  Rng rng(seed);
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::unordered_map<std::string, std::uint64_t> counts;
  for (std::size_t i = 1; counts.size() < distinct; ++i) {
    std::string s;
    const auto len = 4 + rng.below(7);
    for (std::uint64_t k = 0; k < len; ++k) s += kAlphabet[rng.below(sizeof(kAlphabet) - 1)];
    counts.emplace(std::move(s), 1 + 1000 / i);
  }
  return PasswordCorpus::from_counts(counts);
}

const PasswordCorpus& corpus() {
  static const PasswordCorpus c = make_corpus(20000, 1);
  return c;
}

ModelParams params(int order) {
  ModelParams p;
  p.order = order;
  return p;
}

void BM_TrainNGram(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train(ModelKind::NGram, corpus(), p));
}
BENCHMARK(BM_TrainNGram)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_TrainPcfg(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(train(ModelKind::Pcfg, corpus(), {}));
}
BENCHMARK(BM_TrainPcfg)->Unit(benchmark::kMillisecond);

void BM_TrainChunkPcfg(benchmark::State& state) {
  ModelParams p;
  p.vocab_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train(ModelKind::ChunkPcfg, corpus(), p));
}
BENCHMARK(BM_TrainChunkPcfg)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Prob(benchmark::State& state) {
  auto m = train(ModelKind::NGram, corpus(), params(static_cast<int>(state.range(0))));
  const auto& entries = corpus().entries();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m->prob(entries[i].password));
    i = (i + 1) % entries.size();
  }
}
BENCHMARK(BM_Prob)->Arg(4)->Arg(8);

void BM_EnumerateTop(benchmark::State& state) {
  auto m = train(ModelKind::NGram, corpus(), params(4));
  const auto g = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_top(*m, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnumerateTop)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BuildEstimator(benchmark::State& state) {
  auto m = train(ModelKind::NGram, corpus(), params(4));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_estimator(*m, static_cast<std::size_t>(state.range(0)), 7));
}
BENCHMARK(BM_BuildEstimator)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_GuessNumber(benchmark::State& state) {
  auto m = train(ModelKind::NGram, corpus(), params(4));
  auto est = build_estimator(*m, 100000, 7);
  const auto& entries = corpus().entries();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.guess_number(m->prob(entries[i].password)));
    i = (i + 1) % entries.size();
  }
}
BENCHMARK(BM_GuessNumber);

void BM_ThresholdAttack(benchmark::State& state) {
  auto split = split_shadow(corpus(), 3);
  auto m = train(ModelKind::NGram, split.train_half, params(4));
  auto attack = select_threshold(build_labeled(*m, split), 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(attack_threshold(*m, corpus(), attack.delta));
}
BENCHMARK(BM_ThresholdAttack)->Unit(benchmark::kMillisecond);

void BM_ManglerDrain(benchmark::State& state) {
  for (auto _ : state) {
    ManglerGenerator gen(corpus());
    std::size_t n = 0;
    while (n < 100000 && gen.next()) ++n;
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_ManglerDrain)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  AccountStore accounts;
  const auto& entries = corpus().entries();
  for (std::size_t i = 0; i + 1 < 4000; i += 2) {
    const std::string email = "u" + std::to_string(i) + "@example.test";
    accounts.add(email, entries[i].password);
    accounts.add(email, entries[i].password + "1");
  }
  auto gen = learn_rules(training_pairs(accounts));
  SimulationConfig cfg;
  cfg.n_users = 1000;
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(accounts, gen, UsedSet{}, cfg));
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
