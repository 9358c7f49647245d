#include <benchmark/benchmark.h>

#include <random>

#include "k4/canon.hpp"
#include "k4/patterns.hpp"
#include "k4/strategy.hpp"
#include "k4/verifier.hpp"

using namespace k4;

namespace {

ColoredBoard random_board(int n, int moves, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ColoredBoard b(n);
  auto free = b.unclaimed_edges();
  std::shuffle(free.begin(), free.end(), rng);
  for (int i = 0; i < moves; ++i) {
    b.claim({i % 2 == 0 ? Player::First : Player::Second, free[static_cast<std::size_t>(i)]});
  }
  return b;
}

/// Positions reached by the strategy against a random second player.
std::vector<std::pair<ColoredBoard, StrategyState>> strategy_positions(int count) {
  std::mt19937_64 rng(1);
  std::vector<std::pair<ColoredBoard, StrategyState>> out;
  while (static_cast<int>(out.size()) < count) {
    ColoredBoard b(17);
    StrategyState s;
    for (int turn = 0; turn < 12; ++turn) {
      out.emplace_back(b, s);
      StrategyDecision d;
      try {
        d = fp_move(b, s);
      } catch (const StrategyViolation&) {
        out.pop_back();
        break;
      }
      b.claim({Player::First, d.edge});
      s = d.next_state;
      if (has_k4(b, Player::First)) break;
      const auto free = b.unclaimed_edges();
      b.claim({Player::Second, free[rng() % free.size()]});
    }
  }
  return out;
}

void BM_Claim(benchmark::State& state) {
  const ColoredBoard base(17);
  const auto edges = base.unclaimed_edges();
  for (auto _ : state) {
    ColoredBoard b = base;
    for (std::size_t i = 0; i < 40; ++i) {
      b.claim({i % 2 == 0 ? Player::First : Player::Second, edges[i * 3]});
    }
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_Claim);

void BM_Threats(benchmark::State& state) {
  const ColoredBoard b = random_board(17, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(threats(b, Player::First));
}
BENCHMARK(BM_Threats)->Arg(20)->Arg(60);

void BM_CompletionCount(benchmark::State& state) {
  const ColoredBoard b = random_board(17, static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(completion_count(b, Player::First, 2));
}
BENCHMARK(BM_CompletionCount)->Arg(20)->Arg(60);

void BM_CanonicalCode(benchmark::State& state) {
  const ColoredBoard b = random_board(17, static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_code(b));
}
BENCHMARK(BM_CanonicalCode)->Arg(10)->Arg(24)->Arg(42);

void BM_PositionKey(benchmark::State& state) {
  const auto positions = strategy_positions(256);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [b, s] = positions[i++ % positions.size()];
    benchmark::DoNotOptimize(position_key(b, s));
  }
}
BENCHMARK(BM_PositionKey);

void BM_FpMove(benchmark::State& state) {
  const auto positions = strategy_positions(256);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [b, s] = positions[i++ % positions.size()];
    benchmark::DoNotOptimize(fp_move(b, s));
  }
}
BENCHMARK(BM_FpMove);

void BM_FindPromising(benchmark::State& state) {
  const auto positions = strategy_positions(256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(find_promising(positions[i++ % positions.size()].first));
}
BENCHMARK(BM_FindPromising);

void BM_VerifyK3(benchmark::State& state) {
  VerifyOptions o;
  o.cache_entries = std::size_t{1} << 14;
  for (auto _ : state) benchmark::DoNotOptimize(verify_k3(static_cast<int>(state.range(0)), o));
}
BENCHMARK(BM_VerifyK3)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
