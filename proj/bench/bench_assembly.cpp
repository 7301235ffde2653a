#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "plap/assembly.hpp"
#include "plap/parallel.hpp"
#include "plap/punctured_mesh.hpp"

namespace {

using namespace plap;

struct Fixture {
    Mesh mesh;
    OperatorSpec spec;
    std::vector<double> values;

    static const Fixture& get() {
        static const Fixture f = [] {
            DomainConfig cfg;
            cfg.punctures = {{{-1.0, 0.0}, -1.0}, {{1.0, 0.0}, 1.0}};
            cfg.hole_radius = 0.1;
            cfg.outer_radius = 8.0;
            cfg.outer_value = 0.0;
            cfg.spacing = 0.05;
            Mesh mesh = build_mesh(cfg);
            std::vector<double> values = mesh.initial_values(0.0);
            std::mt19937_64 rng(7);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (int k : mesh.free_nodes()) values[k] = u(rng);
            return Fixture{std::move(mesh), make_operator(4.0, 2, ConstantFamily{1.0}), std::move(values)};
        }();
        return f;
    }
};

void BM_GradientSerial(benchmark::State& state) {
    const auto& f = Fixture::get();
    for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_gradient(f.mesh, f.spec, f.values));
    state.SetItemsProcessed(state.iterations() * f.mesh.triangles().size());
}

void BM_GradientParallel(benchmark::State& state) {
    const auto& f = Fixture::get();
    parallel::set_num_threads(static_cast<int>(state.range(0)));
    Assembler assembler(f.mesh, f.spec);
    std::vector<double> g(f.mesh.num_free());
    for (auto _ : state) {
        assembler.gradient(f.values, g);
        benchmark::DoNotOptimize(g.data());
    }
    state.SetItemsProcessed(state.iterations() * f.mesh.triangles().size());
}

void BM_EnergySerial(benchmark::State& state) {
    const auto& f = Fixture::get();
    for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_energy(f.mesh, f.spec, f.values));
    state.SetItemsProcessed(state.iterations() * f.mesh.triangles().size());
}

void BM_EnergyParallel(benchmark::State& state) {
    const auto& f = Fixture::get();
    parallel::set_num_threads(static_cast<int>(state.range(0)));
    Assembler assembler(f.mesh, f.spec);
    for (auto _ : state) benchmark::DoNotOptimize(assembler.energy(f.values));
    state.SetItemsProcessed(state.iterations() * f.mesh.triangles().size());
}

void BM_EnergyAndGradientParallel(benchmark::State& state) {
    const auto& f = Fixture::get();
    parallel::set_num_threads(static_cast<int>(state.range(0)));
    Assembler assembler(f.mesh, f.spec);
    std::vector<double> g(f.mesh.num_free());
    for (auto _ : state) benchmark::DoNotOptimize(assembler.energy_and_gradient(f.values, g));
    state.SetItemsProcessed(state.iterations() * f.mesh.triangles().size());
}

}  // namespace

BENCHMARK(BM_GradientSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnergySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnergyAndGradientParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
