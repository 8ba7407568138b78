// Serial vs OpenMP-parallel timings for the batch kernels: multi-frequency
// forward/adjoint solves and Gram assembly.

#include "invsrc/experiments.hpp"
#include "invsrc/helmholtz_solver.hpp"
#include "invsrc/reconstruction.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace {

using namespace invsrc;

std::vector<double> frequencies(int J) {
    std::vector<double> ks(J);
    std::iota(ks.begin(), ks.end(), 1.0);
    return ks;
}

void bench_forward(benchmark::State& state, ExecPolicy exec) {
    const MediumSpec medium = paper_medium();
    const SourceSpec source = source_f1();
    const auto grid = grid_for(medium, source, 2.0, 8192);
    const auto ks = frequencies(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto fields = solve_direct_batch(medium, source, ks, grid, exec);
        benchmark::DoNotOptimize(fields.data());
    }
}

void bench_gram(benchmark::State& state, ExecPolicy exec) {
    const MediumSpec medium = paper_medium();
    const SourceSpec source = source_f1();
    const int J = static_cast<int>(state.range(0));
    const auto ks = frequencies(J);

    ExperimentConfig cfg;
    cfg.frequencies = ks;
    cfg.n_data = 2049;
    cfg.n_inverse = 4096;
    const MeasurementSet data = generate_synthetic_data(cfg);
    const auto grid = grid_for(medium, source, 2.0, 4096);
    const std::vector<Complex> etas(ks.size(), Complex{1.0, 0.0});
    auto fields = solve_adjoint_batch(medium, etas, ks, grid);
    for (std::size_t j = 0; j < fields.size(); ++j) {
        for (auto& v : fields[j].values) {
            v *= data.entries[j].trace;
        }
    }
    for (auto _ : state) {
        auto gs = assemble_gram(fields, data, exec);
        benchmark::DoNotOptimize(gs.gram.data());
    }
}

void bench_synthesize(benchmark::State& state, ExecPolicy exec) {
    const MediumSpec medium = homogeneous_medium();
    const int J = static_cast<int>(state.range(0));
    const auto ks = frequencies(J);
    const auto grid = grid_for_medium(medium, 2.0, 8192);
    const std::vector<Complex> etas(ks.size(), Complex{1.0, 0.0});
    const auto fields = solve_adjoint_batch(medium, etas, ks, grid);

    MeasurementSet ms;
    ms.R = 2.0;
    for (double k : ks) {
        ms.entries.push_back({k, Complex{1.0, 0.0}, Complex{1.0, 0.0}});
    }
    const GramSystem gs = assemble_gram(fields, ms);
    const Eigen::VectorXcd alpha = Eigen::VectorXcd::Constant(J, Complex{1.0, 0.0});
    for (auto _ : state) {
        auto rec = synthesize_min_norm(alpha, fields, gs, exec);
        benchmark::DoNotOptimize(rec.f_min.values.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(bench_forward, serial, invsrc::ExecPolicy::serial)->Arg(60);
BENCHMARK_CAPTURE(bench_forward, parallel, invsrc::ExecPolicy::parallel)->Arg(60);
BENCHMARK_CAPTURE(bench_gram, serial, invsrc::ExecPolicy::serial)->Arg(40);
BENCHMARK_CAPTURE(bench_gram, parallel, invsrc::ExecPolicy::parallel)->Arg(40);
BENCHMARK_CAPTURE(bench_synthesize, serial, invsrc::ExecPolicy::serial)->Arg(60);
BENCHMARK_CAPTURE(bench_synthesize, parallel, invsrc::ExecPolicy::parallel)->Arg(60);

BENCHMARK_MAIN();
