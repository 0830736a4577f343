// Serial counter propagation vs parallel fixpoint rounds, and serial vs
// parallel system ticks.

#include <benchmark/benchmark.h>

#include <random>

#include "dali/mas.hpp"
#include "dali/parser.hpp"
#include "dali/semantics.hpp"

namespace {

// Layered program: long derivation chains plus wide fan-in.
std::vector<dali::HornClause> layered(std::size_t atoms, std::size_t clauses) {
  std::mt19937_64 rng(42);
  std::vector<dali::HornClause> out;
  auto name = [](std::size_t i) { return "x" + std::to_string(i); };
  for (std::size_t i = 0; i < atoms / 100 + 1; ++i) out.push_back({name(i), {}});
  for (std::size_t k = 0; k < clauses; ++k) {
    const std::size_t head = 1 + rng() % (atoms - 1);
    dali::HornClause c{name(head), {}};
    const std::size_t len = 1 + rng() % 3;
    for (std::size_t j = 0; j < len; ++j) c.body.push_back(name(rng() % head));
    out.push_back(std::move(c));
  }
  return out;
}

void BM_LeastModel(benchmark::State& state, dali::Execution exec) {
  const auto clauses = layered(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)) * 4);
  for (auto _ : state) benchmark::DoNotOptimize(dali::least_model(clauses, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clauses.size()));
}

void BM_SystemRun(benchmark::State& state, dali::Execution exec) {
  dali::SystemConfig c;
  c.agents.push_back(dali::parse_agent_file("agent A. @internal go. @action ring. go. go :> ring."));
  for (std::int64_t i = 0; i < state.range(0); ++i)
    c.agents.push_back(dali::parse_agent_file("agent L" + std::to_string(i) +
                                              ". @external ring. @internal busy. @action answer. "
                                              "p0. p1 :- p0. p2 :- p1, p0. busy :- p2. busy :> answer. "
                                              "ring :> answer."));
  for (auto _ : state) benchmark::DoNotOptimize(dali::run_system(c, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_LeastModel, serial, dali::Execution::serial)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(BM_LeastModel, parallel, dali::Execution::parallel)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(BM_SystemRun, serial, dali::Execution::serial)->Arg(8)->Arg(64);
BENCHMARK_CAPTURE(BM_SystemRun, parallel, dali::Execution::parallel)->Arg(8)->Arg(64);

BENCHMARK_MAIN();
