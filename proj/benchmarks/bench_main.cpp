#include <benchmark/benchmark.h>

#include "mpirecon/core_stage.hpp"
#include "mpirecon/deconv_stage.hpp"
#include "mpirecon/kernels.hpp"
#include "mpirecon/phantom.hpp"
#include "mpirecon/rng.hpp"

using namespace mpirecon;

namespace {

ScanSeries disk_scan(std::size_t samples) {
    ScanSeries s;
    s.geometry = make_lissajous_scan(LissajousSpec{}, samples);
    const auto rho = rasterize(builtin_phantom("disk"), 256, 256);
    s.signals = simulate_signal(core_response_field(rho, KernelParams{}), s.geometry);
    return s;
}

void BM_KernelMatrix(benchmark::State& state) {
    const KernelParams p{};
    SeededGenerator gen(1);
    std::vector<Vec2> ys(1024);
    for (auto& y : ys) y = {2.0 * gen.uniform_open() - 1.0, 2.0 * gen.uniform_open() - 1.0};
    for (auto _ : state)
        for (const auto& y : ys) benchmark::DoNotOptimize(kernel_matrix(y, p));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ys.size()));
}
BENCHMARK(BM_KernelMatrix);

void BM_CoreResponseField(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto rho = rasterize(builtin_phantom("k_stroke"), n, n);
    for (auto _ : state) benchmark::DoNotOptimize(core_response_field(rho, KernelParams{}));
}
BENCHMARK(BM_CoreResponseField)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_CoreOperatorNormal(benchmark::State& state) {
    const auto scan = disk_scan(1632);
    const CoreOperator op(scan.geometry, 64, 64);
    const auto g = op.adjoint(scan.signals);
    for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(op.predict(g)));
}
BENCHMARK(BM_CoreOperatorNormal)->Unit(benchmark::kMillisecond);

void BM_CoreDirectSolve(benchmark::State& state) {
    const auto scan = disk_scan(1632);
    const CoreDirectSolver solver(scan.geometry, 64, 64, 2);
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(scan.signals, 0.01));
}
BENCHMARK(BM_CoreDirectSolve)->Unit(benchmark::kMillisecond);

void BM_CoreDirectSetup(benchmark::State& state) {
    const auto scan = disk_scan(1632);
    for (auto _ : state) benchmark::DoNotOptimize(CoreDirectSolver(scan.geometry, 64, 64, 2));
}
BENCHMARK(BM_CoreDirectSetup)->Unit(benchmark::kMillisecond);

void BM_TikhonovStep(benchmark::State& state) {
    const auto op = build_convolution_operator(KernelParams{}, 100, 100);
    const auto u = op.apply(rasterize(builtin_phantom("bar"), 100, 100));
    const ScalarField rho2(100, 100);
    for (auto _ : state) benchmark::DoNotOptimize(tikhonov_step(u, rho2, 0.1, op));
}
BENCHMARK(BM_TikhonovStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
