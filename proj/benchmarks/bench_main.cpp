#include <benchmark/benchmark.h>

#include <random>

#include "hh/certificates.hpp"
#include "hh/parabolic.hpp"
#include "hh/profile_io.hpp"
#include "hh/shooting.hpp"
#include "hh/variational.hpp"

namespace {

const hh::ProblemParams& params() {
    static const hh::ProblemParams P = hh::validate({3, 2.0, -1.0});
    return P;
}

const hh::ShootingResult& solution() {
    static const hh::ShootingResult r = hh::solve_shooting(params());
    return r;
}

void BM_single_shot(benchmark::State& state) {
    const double V0 = solution().V0_star;
    for (auto _ : state) benchmark::DoNotOptimize(hh::integrate_from(params(), V0));
}
BENCHMARK(BM_single_shot)->Unit(benchmark::kMillisecond);

void BM_solve_shooting(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(hh::solve_shooting(params()));
}
BENCHMARK(BM_solve_shooting)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_certify(benchmark::State& state) {
    const hh::ProfileFile f{solution().header(), solution().profile};
    for (auto _ : state) benchmark::DoNotOptimize(hh::certify(f));
}
BENCHMARK(BM_certify)->Unit(benchmark::kMillisecond);

void BM_run_variational(benchmark::State& state) {
    hh::MinimizerControls c;
    c.grid_size = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hh::run_variational(params(), c));
}
BENCHMARK(BM_run_variational)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_quotient_S(benchmark::State& state) {
    std::mt19937_64 rng(7);
    const hh::RadialProfile p = hh::random_monotone_profile(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hh::quotient_S(p, params()));
}
BENCHMARK(BM_quotient_S)->Arg(200)->Arg(2000);

void BM_parabolic_rhs(benchmark::State& state) {
    const hh::ParabolicState s = hh::separate_variables_state(solution().profile, params());
    const hh::RescaledOperator op(params(), s.grid);
    for (auto _ : state) benchmark::DoNotOptimize(op.rhs(s.U));
}
BENCHMARK(BM_parabolic_rhs)->Unit(benchmark::kMicrosecond);

void BM_parabolic_implicit_step(benchmark::State& state) {
    const hh::ParabolicState s = hh::separate_variables_state(solution().profile, params());
    const hh::RescaledOperator op(params(), s.grid);
    for (auto _ : state) {
        std::vector<double> U = s.U;
        benchmark::DoNotOptimize(op.implicit_step(U, 2e-3, 1e-12, 30));
    }
}
BENCHMARK(BM_parabolic_implicit_step)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
