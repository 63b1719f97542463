// Microbenchmarks for the stepping kernel: node advance, polarization
// quadrature and one full field-coupled step at the default lattice size.

#include <benchmark/benchmark.h>

#include <numbers>

#include "cmb/medium.hpp"
#include "cmb/propagation.hpp"
#include "cmb/pulse.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

cmb::MediumConfig default_medium() {
    cmb::MediumConfig cfg;
    cfg.alphaL = 5.0;
    cfg.nz = 101;
    cfg.grid = cmb::DetuningGrid::uniform(10.0 * 2.0 * kPi / 7.0, 961);
    return cfg;
}

cmb::FieldSlice ramped_field(const cmb::MediumConfig& cfg, double peak) {
    cmb::FieldSlice f;
    f.omega.resize(cfg.nz);
    for (int i = 0; i < cfg.nz; ++i)
        f.omega[i] = peak * std::exp(-0.5 * cfg.zeta(i));
    return f;
}

void BM_Advance(benchmark::State& state) {
    const auto cfg = default_medium();
    auto st = cmb::MediumState::ground(cfg);
    const auto field = ramped_field(cfg, kPi / 7.0);
    const cmb::StepControl step{7.0 / 1280.0, 2.0 * kPi / 7.0};
    for (auto _ : state) {
        cmb::advance(st, field, step, cfg.t2);
        benchmark::DoNotOptimize(st.nodes.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(st.nodes.size()));
}
BENCHMARK(BM_Advance)->Unit(benchmark::kMillisecond);

void BM_Polarization(benchmark::State& state) {
    const auto cfg = default_medium();
    auto st = cmb::MediumState::ground(cfg);
    const auto field = ramped_field(cfg, kPi / 7.0);
    const cmb::StepControl step{7.0 / 1280.0, 2.0 * kPi / 7.0};
    for (int k = 0; k < 64; ++k) cmb::advance(st, field, step, cfg.t2);
    for (auto _ : state) {
        auto p = cmb::polarization(st, step.tau);
        benchmark::DoNotOptimize(p.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(st.nodes.size()));
}
BENCHMARK(BM_Polarization)->Unit(benchmark::kMillisecond);

void BM_ShortRun(benchmark::State& state) {
    // 1 us rectangular pulse through a thin slab, full engine loop
    cmb::MediumConfig cfg;
    cfg.alphaL = 2.0;
    cfg.nz = 21;
    cfg.grid = cmb::DetuningGrid::uniform(10.0 * 2.0 * kPi, 241);
    const auto input = cmb::padded_to(
        cmb::rectangular_pulse(kPi, 1.0, 0.0, 1.0 / 640.0), 6.0);
    for (auto _ : state) {
        auto result = cmb::run(cfg, input);
        benchmark::DoNotOptimize(result.omega_out.samples.data());
    }
}
BENCHMARK(BM_ShortRun)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
