#include <numbers>

#include <benchmark/benchmark.h>

#include <c0ipg/adapt.hpp>
#include <c0ipg/assembly.hpp>

using namespace c0ipg;

namespace {

Mesh slit_mesh(int cells)
{
    return make_uniform(Domain::kSlit, std::numbers::sqrt2 / cells);
}

void BM_Refine(benchmark::State& state)
{
    const Mesh mesh = slit_mesh(static_cast<int>(state.range(0)));
    std::vector<int> marked;
    for (int t = 0; t < mesh.num_triangles(); t += 4) {
        marked.push_back(t);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(refine(mesh, marked));
    }
    state.counters["triangles"] = mesh.num_triangles();
}
BENCHMARK(BM_Refine)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state)
{
    const Mesh mesh = slit_mesh(static_cast<int>(state.range(0)));
    const FeSpace space(mesh, static_cast<int>(state.range(1)));
    const ProblemCoefficients coeffs = builtin_coefficients("affine");
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_pencil(space, coeffs));
    }
    state.counters["dof"] = space.num_free_dofs();
}
BENCHMARK(BM_Assemble)->Args({16, 2})->Args({32, 2})->Args({16, 3})->Unit(benchmark::kMillisecond);

void BM_SolveWithDual(benchmark::State& state)
{
    const Mesh mesh = slit_mesh(static_cast<int>(state.range(0)));
    const FeSpace space(mesh, 2);
    const PencilMatrices pencil = assemble_pencil(space, builtin_coefficients("n16"));
    SolveOptions options;
    options.count = 3;
    const Complex shift(2.8 * 2.8, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_eigenpair(space, pencil, shift, options));
    }
    state.counters["dof"] = space.num_free_dofs();
}
BENCHMARK(BM_SolveWithDual)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Indicators(benchmark::State& state)
{
    const Mesh mesh = slit_mesh(static_cast<int>(state.range(0)));
    const FeSpace space(mesh, 2);
    const ProblemCoefficients coeffs = builtin_coefficients("affine");
    const PencilMatrices pencil = assemble_pencil(space, coeffs);
    SolveOptions options;
    options.count = 3;
    const EigenPair pair = solve_eigenpair(space, pencil, Complex(4.1 * 4.1, 0.0), options);
    const ResidualData primal = ResidualData::primal(pair);
    const ResidualData dual = ResidualData::dual(pair);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_indicators(space, coeffs, primal));
        benchmark::DoNotOptimize(compute_indicators(space, coeffs, dual));
    }
    state.counters["triangles"] = mesh.num_triangles();
}
BENCHMARK(BM_Indicators)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AdaptiveRun(benchmark::State& state)
{
    AdaptConfig config;
    config.target_k = Complex(1.47609911, 0.0);
    config.max_dof = static_cast<int>(state.range(0));
    const ProblemCoefficients coeffs = builtin_coefficients("n16");
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(Domain::kLShape, std::numbers::sqrt2 / 16, coeffs, config));
    }
}
BENCHMARK(BM_AdaptiveRun)->Arg(5000)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
