// Enumeration kernels (reference, pruned serial, OpenMP) and the
// information-set heuristic at several thread counts.

#include <benchmark/benchmark.h>

#include "qctx/geometry.hpp"
#include "qctx/incidence.hpp"
#include "qctx/solver.hpp"

using namespace qctx;

static void BM_ReferenceKernel(benchmark::State& st) {
    const auto n = static_cast<unsigned>(st.range(0)), k = static_cast<unsigned>(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(reference::totally_isotropic_subspaces(n, k).size());
}
BENCHMARK(BM_ReferenceKernel)->Args({3, 1})->Args({3, 2})->Args({4, 1})->Unit(benchmark::kMillisecond);

static void BM_SerialCensus(benchmark::State& st) {
    const auto n = static_cast<unsigned>(st.range(0)), k = static_cast<unsigned>(st.range(1));
    std::uint64_t count = 0;
    for (auto _ : st) count = isotropic_census_serial(n, k).count;
    st.counters["subspaces/s"] = benchmark::Counter(static_cast<double>(count), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_SerialCensus)
    ->Args({3, 1})->Args({3, 2})->Args({4, 1})->Args({4, 2})->Args({5, 1})->Args({5, 2})
    ->Unit(benchmark::kMillisecond);

static void BM_ParallelCensus(benchmark::State& st) {
    const auto n = static_cast<unsigned>(st.range(0)), k = static_cast<unsigned>(st.range(1));
    const auto threads = static_cast<unsigned>(st.range(2));
    std::uint64_t count = 0;
    for (auto _ : st) count = isotropic_census(n, k, threads).count;
    st.counters["subspaces/s"] = benchmark::Counter(static_cast<double>(count), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ParallelCensus)
    ->ArgsProduct({{5}, {1, 2}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

static void BM_Heuristic(benchmark::State& st) {
    static const IncidenceSystem s = build_incidence(subspace_configuration(3, 1));
    SolveBudget b;
    b.method = Method::heuristic;
    b.iterations = 500;
    b.threads = static_cast<unsigned>(st.range(0));
    std::size_t d = 0;
    for (auto _ : st) d = degree_upper_bound(s, b).d;
    st.counters["d"] = static_cast<double>(d);
}
BENCHMARK(BM_Heuristic)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_ExactDegreeElliptic(benchmark::State& st) {
    Configuration c;
    for (const Quadric& q : all_quadrics(3))
        if (q.type == QuadricType::elliptic) {
            c = q.config;
            break;
        }
    const IncidenceSystem s = build_incidence(c);
    SolveBudget b;
    b.method = st.range(0) ? Method::branch_bound : Method::coset_search;
    for (auto _ : st) benchmark::DoNotOptimize(degree_exact(s, b).d);
    st.SetLabel(to_string(b.method));
}
BENCHMARK(BM_ExactDegreeElliptic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
