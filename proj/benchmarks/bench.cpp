#include <benchmark/benchmark.h>

#include "fraclap/bubble.hpp"
#include "fraclap/fft.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/spectral.hpp"

namespace {

fraclap::Field wave(const fraclap::GridSpec& g) {
  fraclap::Field u = fraclap::make_field(g);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = std::sin(0.37 * static_cast<double>(i % 101));
  return u;
}

void bm_transform(benchmark::State& state) {
  auto g = fraclap::make_grid(static_cast<int>(state.range(0)),
                              static_cast<int>(state.range(1)), 1.0);
  auto u = wave(g);
  for (auto _ : state) {
    auto hat = fraclap::transform(u);
    benchmark::DoNotOptimize(hat.coeff.data());
  }
}
BENCHMARK(bm_transform)->Args({1, 1 << 14})->Args({2, 1 << 8})->Args({3, 1 << 5});

void bm_apply_fraclap(benchmark::State& state) {
  auto g = fraclap::make_grid(static_cast<int>(state.range(0)),
                              static_cast<int>(state.range(1)), 1.0);
  auto u = wave(g);
  for (auto _ : state) {
    auto v = fraclap::apply_fraclap(u, 0.7);
    benchmark::DoNotOptimize(v.values.data());
  }
}
BENCHMARK(bm_apply_fraclap)->Args({1, 1 << 14})->Args({2, 1 << 8})->Args({3, 1 << 5});

void bm_seminorm(benchmark::State& state) {
  auto g = fraclap::make_grid(static_cast<int>(state.range(0)),
                              static_cast<int>(state.range(1)), 1.0);
  auto u = wave(g);
  for (auto _ : state) {
    double s = fraclap::seminorm_sq(u, 0.7);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(bm_seminorm)->Args({1, 1 << 14})->Args({2, 1 << 8})->Args({3, 1 << 5});

void bm_lemma31_row(benchmark::State& state) {
  auto g = fraclap::make_grid(1, 1 << 12, 1.0);
  auto mask = fraclap::make_ball_mask(g, 0.5);
  for (auto _ : state) {
    auto row = fraclap::lemma31_quantities(g, mask, 0.35, 0.2, 0.05, 0.125);
    benchmark::DoNotOptimize(row.A_m);
  }
}
BENCHMARK(bm_lemma31_row);

}  // namespace

BENCHMARK_MAIN();
