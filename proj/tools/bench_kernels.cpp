// Serial-reference vs OpenMP kernel comparison.

#include <benchmark/benchmark.h>

#include "jbac/channel.hpp"
#include "jbac/detection.hpp"
#include "jbac/metrics.hpp"
#include "jbac/optimizer.hpp"
#include "jbac/reference.hpp"

namespace {

struct Fixture {
    jbac::SystemConfig cfg;
    jbac::ChannelSet ch;
    jbac::Beamformer w;
    jbac::ReflectingCandidateSet set;

    explicit Fixture(std::size_t n_elements, std::size_t n_patterns) {
        cfg.n_elements = n_elements;
        cfg.n_patterns = n_patterns;
        cfg.noise_power = 0.5;
        ch = jbac::generate_channels(cfg, 7);
        w = jbac::init_beamformer(cfg, 7);
        set = jbac::init_patterns(cfg, 7);
    }
};

void BM_SimulateBerSerial(benchmark::State& state) {
    Fixture fx(20, 8);
    for (auto _ : state) {
        auto res = jbac::ref::simulate_ber(fx.ch, fx.w, fx.set, fx.cfg, fx.cfg.noise_power,
                                           static_cast<std::uint64_t>(state.range(0)), 7,
                                           ~std::uint64_t{0});
        benchmark::DoNotOptimize(res.bit_errors);
    }
}
BENCHMARK(BM_SimulateBerSerial)->Arg(1 << 16);

void BM_SimulateBerOmp(benchmark::State& state) {
    Fixture fx(20, 8);
    for (auto _ : state) {
        auto res = jbac::simulate_ber(fx.ch, fx.w, fx.set, fx.cfg, fx.cfg.noise_power,
                                      static_cast<std::uint64_t>(state.range(0)), 7,
                                      ~std::uint64_t{0});
        benchmark::DoNotOptimize(res.bit_errors);
    }
}
BENCHMARK(BM_SimulateBerOmp)->Arg(1 << 16);

void BM_MutualInfoSerial(benchmark::State& state) {
    Fixture fx(20, 8);
    for (auto _ : state) {
        double mi = jbac::ref::mutual_information_mc(fx.ch, fx.w, fx.set, fx.cfg.noise_power,
                                                     static_cast<std::size_t>(state.range(0)), 7);
        benchmark::DoNotOptimize(mi);
    }
}
BENCHMARK(BM_MutualInfoSerial)->Arg(1 << 13);

void BM_MutualInfoOmp(benchmark::State& state) {
    Fixture fx(20, 8);
    for (auto _ : state) {
        double mi = jbac::mutual_information_mc(fx.ch, fx.w, fx.set, fx.cfg.noise_power,
                                                static_cast<std::size_t>(state.range(0)), 7);
        benchmark::DoNotOptimize(mi);
    }
}
BENCHMARK(BM_MutualInfoOmp)->Arg(1 << 13);

void BM_UnionBoundSerialRef(benchmark::State& state) {
    Fixture fx(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        double b = jbac::ref::ber_union_bound_closed(fx.ch, fx.w, fx.set, fx.cfg.noise_power);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_UnionBoundSerialRef)->Arg(64)->Arg(256);

void BM_UnionBoundClosed(benchmark::State& state) {
    Fixture fx(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        double b = jbac::ber_union_bound_closed(fx.ch, fx.w, fx.set, fx.cfg.noise_power);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_UnionBoundClosed)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
