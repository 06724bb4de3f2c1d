#include <benchmark/benchmark.h>

#include "iamnet/analytic_gca.hpp"
#include "iamnet/analytic_spla.hpp"
#include "iamnet/model.hpp"
#include "iamnet/rate.hpp"
#include "iamnet/simulator.hpp"
#include "iamnet/specfun.hpp"

using namespace iamnet;

namespace {

NetworkConfig at_i0(double i0_dbm) {
    auto cfg = default_network_config();
    cfg.i0 = dbm_to_watts(i0_dbm);
    return cfg;
}

void BM_Gauss2F1(benchmark::State& state) {
    const double z = -static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gauss_2f1(1.0, 1.0 - 2.0 / 3.8, 2.0 - 2.0 / 3.8, z));
}
BENCHMARK(BM_Gauss2F1)->Arg(0)->Arg(1)->Arg(100)->Arg(100000);

void BM_GcaContext(benchmark::State& state) {
    const auto cfg = at_i0(-90.0);
    for (auto _ : state) benchmark::DoNotOptimize(GcaContext(cfg).pr_active());
}
BENCHMARK(BM_GcaContext)->Unit(benchmark::kMicrosecond);

void BM_Chi(benchmark::State& state) {
    const GcaContext ctx(at_i0(-90.0));
    const double s = 1.0 / ctx.config().p0;
    for (auto _ : state) benchmark::DoNotOptimize(ctx.chi(s, 100.0, 0, 1));
}
BENCHMARK(BM_Chi)->Unit(benchmark::kMicrosecond);

void BM_Beta(benchmark::State& state) {
    const GcaContext ctx(at_i0(-90.0));
    const double s = 1.0 / ctx.config().p0;
    for (auto _ : state) benchmark::DoNotOptimize(ctx.beta(s, 0));
}
BENCHMARK(BM_Beta)->Unit(benchmark::kMillisecond);

void BM_SinrCcdf(benchmark::State& state) {
    const GcaContext ctx(at_i0(static_cast<double>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(ctx.sinr_ccdf(db_to_linear(5.0)));
}
BENCHMARK(BM_SinrCcdf)->Arg(-90)->Arg(-60)->Unit(benchmark::kMillisecond);

void BM_SinrCcdfSpla(benchmark::State& state) {
    auto cfg = at_i0(-90.0);
    cfg.tiers[0].assoc_weight = 1.0;
    const SplaContext ctx(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(ctx.sinr_ccdf_spla(db_to_linear(5.0)));
}
BENCHMARK(BM_SinrCcdfSpla)->Unit(benchmark::kMicrosecond);

void BM_SimulateDrop(benchmark::State& state) {
    const auto cfg = at_i0(-90.0);
    const double radius = static_cast<double>(state.range(0));
    std::uint64_t drop = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_drop(cfg, radius, 1, drop++).tagged_sinr);
}
BENCHMARK(BM_SimulateDrop)->Arg(2500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
