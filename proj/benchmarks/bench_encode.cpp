// Micro benchmarks for the hot encoding paths: sliding-window cosine matching
// and the exact vs PCA-reduced layer-2 encoders.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hw/hwcore.hpp"

namespace {

std::vector<float> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    std::vector<float> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

hw::hwcore::Layer2Bank make_bank(int base_count, int th, int tw, int tz, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    hw::hwcore::Layer2Bank bank;
    bank.base_count = base_count;
    bank.variants_per_base = 1;
    bank.tpl_height = th;
    bank.tpl_width = tw;
    bank.tpl_depth = tz;
    for (int i = 0; i < base_count; ++i) {
        hw::FeatureMap tpl(th, tw, tz);
        tpl.data = random_vec(rng, tpl.size());
        bank.templates.push_back(std::move(tpl));
    }
    return bank;
}

hw::FeaturePyramid make_pyramid(int h, int w, int z, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    hw::FeatureMap level(h, w, z);
    level.data = random_vec(rng, level.size());
    hw::FeaturePyramid pyr;
    pyr.levels.push_back({1.0, std::move(level)});
    return pyr;
}

void BM_NdpConvolve(benchmark::State& state) {
    std::mt19937_64 rng(1);
    hw::FeatureMap level(48, 48, 8), tpl(12, 12, 8);
    level.data = random_vec(rng, level.size());
    tpl.data = random_vec(rng, tpl.size());
    for (auto _ : state) benchmark::DoNotOptimize(hw::hwcore::ndp_convolve(level, tpl));
}
BENCHMARK(BM_NdpConvolve);

void BM_EncodeLayer2(benchmark::State& state) {
    const auto bank = make_bank(static_cast<int>(state.range(0)), 10, 10, 4, 2);
    const auto pyr = make_pyramid(32, 32, 4, 3);
    for (auto _ : state) benchmark::DoNotOptimize(hw::hwcore::encode_layer2(pyr, bank));
}
BENCHMARK(BM_EncodeLayer2)->Arg(64)->Arg(256);

void BM_EncodeLayer2Reduced(benchmark::State& state) {
    const auto bank = make_bank(256, 10, 10, 4, 2);
    const auto pyr = make_pyramid(32, 32, 4, 3);
    const auto basis = hw::hwcore::fit_template_pca(bank, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(hw::hwcore::encode_layer2_reduced(pyr, bank, basis));
}
BENCHMARK(BM_EncodeLayer2Reduced)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
