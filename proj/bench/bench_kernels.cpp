// Parallel kernels against their serial references at the default geometry.
// Run with OMP_NUM_THREADS to pick the thread count of the parallel side.

#include <benchmark/benchmark.h>

#include <random>

#include "pmv/analysis.hpp"
#include "pmv/reference.hpp"
#include "pmv/source_images.hpp"
#include "pmv/transforms.hpp"

namespace {

const pmv::Image& source() {
    static const pmv::Image img = pmv::generate_source(pmv::Generator::perlin, 224, 1);
    return img;
}

const pmv::Clip& clip() {
    static const pmv::Clip c = [] {
        pmv::AffineParams a;
        a.angle_deg = 5.0;
        pmv::Clip out;
        out.frames.push_back(source());
        for (int t = 1; t < 16; ++t) out.frames.push_back(pmv::warp_affine(out.frames.back(), a));
        return out;
    }();
    return c;
}

pmv::AffineParams affine() {
    pmv::AffineParams a;
    a.angle_deg = 9.0;
    a.translate_x = 0.008;
    a.shear_deg = 0.6;
    return a;
}

std::array<pmv::Vec2, 4> corners() {
    return {pmv::Vec2{0.02, 0.01}, pmv::Vec2{-0.015, 0.02}, pmv::Vec2{-0.01, -0.02}, pmv::Vec2{0.02, -0.005}};
}

pmv::ColorJitterParams jitter() { return {0.1, -0.2, 0.15, 0.05}; }

constexpr pmv::RectF kRect{40.0, 30.0, 120.0, 120.0};

void BM_crop_resize(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::crop_resize(source(), kRect, 224));
}
void BM_crop_resize_ref(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::ref::crop_resize(source(), kRect, 224));
}
void BM_warp_affine(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::warp_affine(source(), affine()));
}
void BM_warp_affine_ref(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::ref::warp_affine(source(), affine()));
}
void BM_warp_perspective(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::warp_perspective(source(), corners()));
}
void BM_warp_perspective_ref(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::ref::warp_perspective(source(), corners()));
}
void BM_color_jitter(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::color_jitter(source(), jitter()));
}
void BM_color_jitter_ref(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::ref::color_jitter(source(), jitter()));
}
void BM_gap_differences(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::gap_differences(clip()));
}
void BM_gap_differences_ref(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::ref::gap_differences(clip()));
}
void BM_trackability(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::trackability(clip(), pmv::TrackParams{}));
}
void BM_trackability_ref(benchmark::State& s) {
    for (auto _ : s) benchmark::DoNotOptimize(pmv::ref::trackability(clip(), pmv::TrackParams{}));
}

}  // namespace

BENCHMARK(BM_crop_resize)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_crop_resize_ref)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_warp_affine)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_warp_affine_ref)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_warp_perspective)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_warp_perspective_ref)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_color_jitter)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_color_jitter_ref)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_gap_differences)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_gap_differences_ref)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_trackability)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_trackability_ref)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
