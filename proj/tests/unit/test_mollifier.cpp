#include "itolp/errors.hpp"
#include "itolp/mollifier.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace itolp;

namespace {

double bump(std::span<const double> x, double c, double r)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    s /= r * r;
    return s < 1.0 ? c * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

Field difference(const Field& a, const Field& b)
{
    Field out = a;
    for (std::size_t j = 0; j < out.values().size(); ++j) out.values()[j] -= b.values()[j];
    return out;
}

}  // namespace

TEST_CASE("kernel weights")
{
    const SpaceGrid g(2, 1.0, 32);
    CHECK_THROWS_AS(MollKernel(g, 1.5 * g.spacing()), ConfigError);
    const MollKernel k(g, 3.0 * g.spacing());
    double s = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        CHECK(k.weight(j) > 0.0);
        const double r = std::hypot(static_cast<double>(k.offset(j, 0)), static_cast<double>(k.offset(j, 1)));
        CHECK(r < 3.0);
        s += k.weight(j);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(k.radius() == 3);
    // L_1 norm of the density is the total weight
    CHECK(k.lq_norm(1.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constants and mass are preserved")
{
    const SpaceGrid g(1, 1.0, 64);
    const MollKernel k(g, 4.0 * g.spacing());
    const auto u = Field::sample(g, [](std::span<const double> x) { return std::abs(x[0]) < 0.7 ? 2.5 : 0.0; });
    const auto m = mollify(u, k);
    double su = 0.0, sm = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        su += u.values()[c];
        sm += m.values()[c];
        if (std::abs(g.center(c, 0)) < 0.5) CHECK(m.values()[c] == doctest::Approx(2.5).epsilon(1e-15));
    }
    CHECK(sm == doctest::Approx(su).epsilon(1e-14));
    const auto wide = Field::sample(g, [](std::span<const double> x) { return std::abs(x[0]) < 0.95 ? 1.0 : 0.0; });
    CHECK_THROWS_AS(mollify(wide, k), ConfigError);
}

TEST_CASE("contraction on random fields")
{
    const SpaceGrid g(2, 1.0, 24);
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double eps : {2.0, 3.0}) {
        const MollKernel k(g, eps * g.spacing());
        for (int i = 0; i < 25; ++i) {
            Field u(g, 2);
            for (std::size_t c = 0; c < g.size(); ++c) {
                if (g.in_margin(c, k.radius())) continue;
                u.at(c)[0] = n(rng);
                u.at(c)[1] = n(rng) * n(rng);
            }
            const auto m = mollify(u, k);
            for (double p : {2.0, 3.0, 4.0, 6.0}) CHECK(lp_norm(m, p) <= lp_norm(u, p) + 1e-12);
        }
    }
}

TEST_CASE("convergence as eps decreases")
{
    const SpaceGrid g(1, 1.0, 128);
    const auto u = Field::sample(g, [](std::span<const double> x) { return bump(x, 1.0, 0.6) * (1.0 + x[0]); });
    for (double p : {2.0, 4.0}) {
        double previous = INFINITY;
        for (double e : {8.0, 4.0, 2.0}) {
            const double dist = lp_norm(difference(mollify(u, MollKernel(g, e * g.spacing())), u), p);
            CHECK(dist < previous);
            previous = dist;
        }
    }
}

TEST_CASE("pointwise bound by the kernel's dual norm")
{
    const SpaceGrid g(2, 1.0, 20);
    const MollKernel k(g, 2.5 * g.spacing());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    Field u(g, 1);
    for (std::size_t c = 0; c < g.size(); ++c) u.values()[c] = g.in_margin(c, 3) ? 0.0 : uu(rng);
    const auto m = mollify(u, k);
    for (double p : {2.0, 3.0, 6.0}) {
        const double bound = k.lq_norm(p / (p - 1.0)) * lp_norm(u, p);
        for (double v : m.values()) CHECK(std::abs(v) <= bound * (1.0 + 1e-14));
    }
}

TEST_CASE("mollified path equals the path of mollified drivers")
{
    FieldDrivers d;
    d.dim = 1;
    d.n_wiener = 1;
    d.drift = [](double t, std::span<const double> x, std::span<double> out) { out[0] = bump(x, 0.4, 0.4) * (1.0 - t); };
    d.diffusion = [](double, std::span<const double> x, std::span<double> out) { out[0] = bump(x, 0.3, 0.5); };
    d.jump = [](double, std::span<const double> x, const Mark& z, std::span<double> out) { out[0] = bump(x, z[0], 0.35); };
    d.initial = [](std::span<const double> x, std::span<double> out) { out[0] = bump(x, 1.0, 0.5); };
    const SpaceGrid g(1, 1.0, 48);
    const MollKernel k(g, 4.0 * g.spacing());
    FieldModel model{d, MarkSpace::box({0.5}, {1.5}, 2.0, 2), g, TimeGrid::uniform(1.0, 12), LpMode::thm21, 1};
    const auto fp = simulate_field_path(model, 8, 3);
    REQUIRE(fp.jumps.size() > 0);

    const auto smooth = mollify_pathwise(fp, k);
    const auto built = build_field_path(mollify_drivers(d, k), fp.marks, fp.jumps, fp.wiener, g, fp.grid, LpMode::thm21);
    const auto rebuilt = rebuild_field_path(smooth);
    double scale = 0.0;
    for (double v : smooth.values) scale = std::max(scale, std::abs(v));
    for (std::size_t j = 0; j < smooth.values.size(); ++j) {
        CHECK(std::abs(smooth.values[j] - built.values[j]) <= 1e-13 * scale);
        CHECK(std::abs(smooth.values[j] - rebuilt.values[j]) <= 1e-13 * scale);
        CHECK(std::abs(smooth.left_limits[j] - built.left_limits[j]) <= 1e-13 * scale);
    }
    for (std::size_t j = 0; j < smooth.jump_square.size(); ++j) {
        CHECK(std::abs(smooth.jump_square[j] - built.jump_square[j]) <= 1e-13);
    }

    FieldDrivers zero;
    const auto z = build_field_path(zero, fp.marks, fp.jumps, fp.wiener, g, fp.grid, LpMode::thm21);
    const auto zm = mollify_pathwise(z, k);
    for (double v : zm.values) CHECK(v == 0.0);
}
