#include "chemoswitch/radial.hpp"
#include "chemoswitch/solver1d.hpp"
#include "chemoswitch/solver2d.hpp"
#include "chemoswitch/stability.hpp"

#include <benchmark/benchmark.h>

namespace cs = chemoswitch;

static void BM_Rhs1D(benchmark::State& state) {
    cs::ModelParams p;
    p.switching.kind = static_cast<cs::SwitchingCase>(state.range(0));
    p.switching.q = 30.0;
    const auto grid = cs::Grid1D::from_spacing(40.0, 0.1);
    const auto ic = cs::initial_condition_1d(grid, {});
    std::vector<double> y;
    y.insert(y.end(), ic.n0.begin(), ic.n0.end());
    y.insert(y.end(), ic.n1.begin(), ic.n1.end());
    y.insert(y.end(), ic.s.begin(), ic.s.end());
    std::vector<double> dy(y.size());
    for (auto _ : state) {
        cs::spatial_rhs_1d(p, grid, y, dy);
        benchmark::DoNotOptimize(dy.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.n_cells);
}
BENCHMARK(BM_Rhs1D)->Arg(static_cast<int>(cs::SwitchingCase::A))->Arg(static_cast<int>(cs::SwitchingCase::B1));

static void BM_Step2D(benchmark::State& state) {
    cs::ModelParams p;
    p.switching.kind = static_cast<cs::SwitchingCase>(state.range(1));
    const auto grid = cs::Grid2D::from_spacing(40.0, 40.0 / static_cast<double>(state.range(0)));
    auto cur = cs::initial_condition_2d(grid, 0.5, 0.01, {});
    cs::StateField2D next;
    for (auto _ : state) {
        cs::step_2d(p, grid, cur, 1e-3, next);
        std::swap(cur, next);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.cells()));
}
BENCHMARK(BM_Step2D)->Args({80, static_cast<int>(cs::SwitchingCase::A)})
    ->Args({80, static_cast<int>(cs::SwitchingCase::B2)});

static void BM_RadialRhs(benchmark::State& state) {
    cs::ModelParams p;
    p.chi = 8.0;
    const auto grid = cs::RadialGrid::from_spacing(10.0, 5e-3);
    const auto y = cs::radial_initial_state(grid, {}, p.variant);
    std::vector<double> dy(y.size());
    for (auto _ : state) {
        cs::radial_rhs(p, grid, y, dy);
        benchmark::DoNotOptimize(dy.data());
    }
}
BENCHMARK(BM_RadialRhs);

static void BM_Eigenvalues(benchmark::State& state) {
    cs::ModelParams p;
    const auto h = cs::h_values_analytic(p.switching);
    double k2 = 0.01;
    for (auto _ : state) {
        const auto roots = cs::eigenvalues(cs::dispersion_coeffs(p, h, k2));
        benchmark::DoNotOptimize(roots);
        k2 = k2 < 50.0 ? k2 * 1.01 : 0.01;
    }
}
BENCHMARK(BM_Eigenvalues);

BENCHMARK_MAIN();
