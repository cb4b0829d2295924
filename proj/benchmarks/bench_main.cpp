//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/circulant.hpp"
#include "circq/quant.hpp"
#include "circq/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace circq;

std::vector<double> noise(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (double& x : v) {
        x = g(rng);
    }
    return v;
}

void BM_Fft(benchmark::State& state)
{
    const auto v = noise(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral::fft(v));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(4, 1024);

void BM_CircularConvolve(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto w = noise(n, 2);
    const auto x = noise(n, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral::circular_convolve(w, x));
    }
}
BENCHMARK(BM_CircularConvolve)->RangeMultiplier(4)->Range(4, 256);

// One 3x3 layer on a 26x26 map; spectral path against the direct sum.
void BM_ConvForward(benchmark::State& state)
{
    const auto lb = static_cast<std::size_t>(state.range(0));
    const std::size_t c = 64;
    const FeatureMap fm(26, 26, c, noise(26 * 26 * c, 4));
    const auto w = circulant::compress_weights(WeightTensor4D(3, c, c, noise(9 * c * c, 5)), lb);
    for (auto _ : state) {
        benchmark::DoNotOptimize(circulant::conv_forward(fm, w, 1, 1));
    }
}
BENCHMARK(BM_ConvForward)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NaiveConvForward(benchmark::State& state)
{
    const std::size_t c = 64;
    const FeatureMap fm(26, 26, c, noise(26 * 26 * c, 4));
    const WeightTensor4D w(3, c, c, noise(9 * c * c, 5));
    const std::vector<double> bias(c, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(circulant::naive_conv_forward(fm, w, bias, 1, 1));
    }
}
BENCHMARK(BM_NaiveConvForward)->Unit(benchmark::kMillisecond);

void BM_QuantizeValue(benchmark::State& state)
{
    const auto scheme = state.range(0) == 0 ? quant::QuantScheme::equal_distance(256, 0.01)
                                            : quant::QuantScheme::mixed_pow2(4, 3, 0.01);
    const quant::Quantizer q(scheme);
    const auto xs = noise(4096, 6);
    for (auto _ : state) {
        double acc = 0;
        for (double x : xs) {
            acc += q(x);
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_QuantizeValue)->Arg(0)->Arg(1);

void BM_ShiftAddMultiply(benchmark::State& state)
{
    const auto code = quant::QuantCode::from_string("101101", 3, 2);
    std::int64_t x = 12345;
    for (auto _ : state) {
        benchmark::DoNotOptimize(quant::shift_add_multiply(x, code));
        ++x;
    }
}
BENCHMARK(BM_ShiftAddMultiply);

} // namespace

BENCHMARK_MAIN();
