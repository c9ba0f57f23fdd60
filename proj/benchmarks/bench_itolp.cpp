#include "itolp/ito_lp.hpp"
#include "itolp/mollifier.hpp"
#include "itolp/semimartingale.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace itolp;

namespace {

double bump(std::span<const double> x, double c, double r)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    s /= r * r;
    return s < 1.0 ? c * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

FdModel fd_model(std::size_t steps)
{
    FdModel m;
    m.drivers.dim = 2;
    m.drivers.n_wiener = 2;
    m.drivers.drift = [](double t, std::span<double> out) {
        out[0] = std::sin(t);
        out[1] = 0.2;
    };
    m.drivers.diffusion = [](double, std::span<double> out) {
        out[0] = 0.5;
        out[1] = 0.1;
        out[2] = 0.0;
        out[3] = 0.4;
    };
    m.drivers.compensated = [](double, const Mark& z, std::span<double> out) {
        out[0] = 0.3 * z[0];
        out[1] = -0.2;
    };
    m.marks = MarkSpace::box({0.0}, {1.0}, 2.0, 4);
    m.grid = TimeGrid::uniform(1.0, steps);
    m.x0 = {1.0, 0.5};
    return m;
}

FieldModel field_model(std::size_t dim, std::size_t cells)
{
    FieldDrivers d;
    d.n_wiener = 1;
    d.drift = [](double t, std::span<const double> x, std::span<double> out) { out[0] = bump(x, 0.5, 0.5) * std::cos(t); };
    d.diffusion = [](double, std::span<const double> x, std::span<double> out) { out[0] = bump(x, 0.3, 0.6); };
    d.jump = [](double, std::span<const double> x, const Mark& z, std::span<double> out) { out[0] = bump(x, z[0], 0.4); };
    d.initial = [](std::span<const double> x, std::span<double> out) { out[0] = bump(x, 1.0, 0.6); };
    return {d, MarkSpace::box({0.0}, {1.0}, 2.0, 4), SpaceGrid(dim, 1.0, cells), TimeGrid::uniform(1.0, 32), LpMode::thm21, 1};
}

void BM_simulate_path_fd(benchmark::State& state)
{
    const auto m = fd_model(static_cast<std::size_t>(state.range(0)));
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_path_fd(m, 1, i++));
}
BENCHMARK(BM_simulate_path_fd)->Arg(64)->Arg(1024);

void BM_eval_ito_fd(benchmark::State& state)
{
    const auto path = simulate_path_fd(fd_model(static_cast<std::size_t>(state.range(0))), 1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(eval_ito_fd(path, 3.0, 1.0));
}
BENCHMARK(BM_eval_ito_fd)->Arg(64)->Arg(1024);

void BM_simulate_field_path(benchmark::State& state)
{
    const auto m = field_model(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_field_path(m, 1, i++));
}
BENCHMARK(BM_simulate_field_path)->Args({1, 128})->Args({2, 32});

void BM_eval_ito_lp(benchmark::State& state)
{
    const auto fp = simulate_field_path(field_model(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1))), 1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(eval_ito_lp(fp, 3.0, 1.0, LpMode::thm21));
}
BENCHMARK(BM_eval_ito_lp)->Args({1, 128})->Args({2, 32});

void BM_mollify(benchmark::State& state)
{
    const SpaceGrid g(2, 1.0, static_cast<std::size_t>(state.range(0)));
    const MollKernel k(g, 4.0 * g.spacing());
    const auto u = Field::sample(g, [](std::span<const double> x) { return bump(x, 1.0, 0.6); });
    for (auto _ : state) benchmark::DoNotOptimize(mollify(u, k));
}
BENCHMARK(BM_mollify)->Arg(32)->Arg(96);

}  // namespace

BENCHMARK_MAIN();
