#include "vishell/fem2d.hpp"
#include "vishell/fem3d.hpp"
#include "vishell/geometry.hpp"
#include "vishell/kinematics.hpp"
#include "vishell/material.hpp"

#include <benchmark/benchmark.h>

using namespace vishell;

namespace {

const GraphChart& bench_chart() {
    static GraphChart chart({0.3, 1.3, 0.7, 0.05, 0.1}, {0.0, 0.0, 1.0, 1.0, false});
    return chart;
}

void BM_SurfaceEval(benchmark::State& state) {
    const Eigen::Vector2d y(0.37, 0.61);
    for (auto _ : state) {
        benchmark::DoNotOptimize(surface_eval(bench_chart(), y));
    }
}
BENCHMARK(BM_SurfaceEval);

void BM_VolumeEval(benchmark::State& state) {
    const Eigen::Vector3d x(0.37, 0.61, 0.4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(volume_eval(bench_chart(), 0.1, x));
    }
}
BENCHMARK(BM_VolumeEval);

void BM_Tensors2D(benchmark::State& state) {
    const MaterialParams mat(1.0, 1.0, 1.0, 1.0);
    const SurfacePointData s = surface_eval(bench_chart(), {0.4, 0.5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(tensors_2d(mat, s));
    }
}
BENCHMARK(BM_Tensors2D);

void BM_BendingStrain(benchmark::State& state) {
    const SurfacePointData s = surface_eval(bench_chart(), {0.4, 0.5});
    Field2DSample f;
    f.eta << 0.3, -0.2;
    f.deta << 0.1, 0.4, -0.3, 0.2;
    f.eta3 = 0.7;
    f.deta3 << 0.5, -0.1;
    f.d2eta3 << 1.0, 0.2, 0.2, -0.6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bending_strain(f, s));
    }
}
BENCHMARK(BM_BendingStrain);

void BM_Assemble2D(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Mesh2D mesh(bench_chart().domain(), n, n, {Edge::Left});
    DofLayout2D layout(mesh, Formulation2D::Full);
    FlexuralAssembler assembler(layout, bench_chart(), MaterialParams(1, 1, 1, 1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(assembler.assemble_bending(BendingTensor::A));
    }
}
BENCHMARK(BM_Assemble2D)->Arg(8)->Arg(16);

void BM_Assemble3D(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    PlateChart chart;
    Mesh2D fp(chart.domain(), n, n, {Edge::Left});
    Mesh3D mesh(fp, 4);
    DofLayout3D layout(mesh);
    ShellAssembler3D assembler(layout, chart, MaterialParams(1, 1, 1, 1), 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assembler.assemble_stiffness());
    }
}
BENCHMARK(BM_Assemble3D)->Arg(8)->Arg(16);

void BM_MemoryStep(benchmark::State& state) {
    PlateChart chart;
    Mesh2D mesh(chart.domain(), 16, 16, {Edge::Left});
    DofLayout2D layout(mesh, Formulation2D::PlateBending);
    const MaterialParams mat(1, 1, 1, 1);
    FlexuralAssembler assembler(layout, chart, mat);
    VolterraStepper stepper(assembler.assemble_bending(BendingTensor::A),
                            assembler.assemble_bending(BendingTensor::B),
                            assembler.assemble_bending(BendingTensor::C),
                            SparseMat(layout.n_free(), layout.n_free()), mat.k_decay(), 0.05, 1.0);
    Loads loads;
    loads.volume = [](double, const Eigen::Vector2d&, double) {
        return Eigen::Vector3d{0.0, 0.0, 1.0};
    };
    const Eigen::VectorXd F = assembler.load_vector(loads, 0.0);
    for (auto _ : state) {
        stepper.step(F);
        benchmark::DoNotOptimize(stepper.state());
    }
}
BENCHMARK(BM_MemoryStep);

} // namespace

BENCHMARK_MAIN();
