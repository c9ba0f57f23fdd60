#include "itolp/errors.hpp"
#include "itolp/field_process.hpp"
#include "itolp/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace itolp;

namespace {

double bump(std::span<const double> x, double c, double r)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    s /= r * r;
    return s < 1.0 ? c * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

FieldDrivers full_drivers(std::size_t m, std::size_t nw)
{
    FieldDrivers d;
    d.dim = m;
    d.n_wiener = nw;
    d.drift = [](double t, std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = bump(x, 0.5 + 0.1 * static_cast<double>(i), 0.5) * std::cos(t);
    };
    d.diffusion = [](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = bump(x, 0.3 - 0.05 * static_cast<double>(j), 0.6);
    };
    d.jump = [](double t, std::span<const double> x, const Mark& z, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = bump(x, z[0] - 0.3 * static_cast<double>(i), 0.4) * (1.0 + t);
    };
    d.initial = [](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = bump(x, 1.0 - 0.5 * static_cast<double>(i), 0.7);
    };
    return d;
}

}  // namespace

TEST_CASE("L_p norms")
{
    const SpaceGrid g(1, 2.0, 64);
    CHECK(lp_norm(Field(g, 2), 3.0) == 0.0);
    const auto ind = Field::sample(g, [](std::span<const double> x) { return std::abs(x[0]) < 1.0 ? 1.0 : 0.0; });
    CHECK(lp_norm(ind, 3.0) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));

    const SpaceGrid wide(1, 6.0, 768);
    REQUIRE(wide.spacing() == 1.0 / 64.0);
    const auto gauss = Field::sample(wide, [](std::span<const double> x) { return std::exp(-x[0] * x[0]); });
    CHECK(std::abs(lp_norm(gauss, 2.0) - std::pow(std::numbers::pi / 2.0, 0.25)) <= 1e-4);

    const SpaceGrid g2(2, 1.0, 32);
    const auto box = Field::sample(g2, [](std::span<const double> x) {
        return std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.25 ? 2.0 : 0.0;
    });
    CHECK(lp_norm_pow(box, 2.0) == doctest::Approx(4.0 * 0.5).epsilon(1e-14));
    CHECK_THROWS_AS(lp_norm(box, 0.5), DomainError);
}

TEST_CASE("weak pairing")
{
    const SpaceGrid g(2, 1.0, 24);
    const ScalarPointFn phi = [](std::span<const double> x) { return bump(x, 1.0, 0.8); };
    CHECK(weak_pairing(Field(g, 1), phi)[0] == 0.0);
    const auto u = Field::sample(g, phi);
    CHECK(weak_pairing(u, phi)[0] == doctest::Approx(lp_norm_pow(u, 2.0)).epsilon(1e-14));

    const auto v = Field::sample(g, 2, [](std::span<const double> x, std::span<double> out) {
        out[0] = std::sin(3.0 * x[0]);
        out[1] = x[1] * x[1];
    });
    const auto w = Field::sample(g, 2, [](std::span<const double> x, std::span<double> out) {
        out[0] = std::cos(x[1]);
        out[1] = 1.0;
    });
    Field mix(g, 2);
    for (std::size_t j = 0; j < mix.values().size(); ++j) mix.values()[j] = 2.0 * v.values()[j] - 0.5 * w.values()[j];
    const auto pv = weak_pairing(v, phi), pw = weak_pairing(w, phi), pm = weak_pairing(mix, phi);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(pm[i] - (2.0 * pv[i] - 0.5 * pw[i])) <= 1e-14);

    CHECK_THROWS_AS(weak_pairing(u, [](std::span<const double>) { return 1.0; }), ConfigError);
}

TEST_CASE("Hoelder inequality at grid level")
{
    const SpaceGrid g(2, 1.0, 16);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Field u(g, 1), phi(g, 1);
        for (std::size_t c = 0; c < g.size(); ++c) {
            u.values()[c] = n(rng);
            phi.values()[c] = g.in_margin(c, 1) ? 0.0 : n(rng);
        }
        const auto test = [&](std::span<const double> x) {
            const auto ix = static_cast<std::size_t>((x[0] + 1.0) / g.spacing());
            const auto iy = static_cast<std::size_t>((x[1] + 1.0) / g.spacing());
            return phi.values()[ix + 16 * iy];
        };
        for (double p : {2.0, 3.0, 4.0}) {
            const double q = p / (p - 1.0);
            CHECK(std::abs(weak_pairing(u, test)[0]) <= lp_norm(u, p) * lp_norm(phi, q) * (1.0 + 1e-14));
        }
    }
}

TEST_CASE("central differences")
{
    const SpaceGrid g(1, 1.0, 64);
    const auto window = [](double x) { return std::abs(x) < 0.6; };
    const auto cst = Field::sample(g, [&](std::span<const double> x) { return window(x[0]) ? 2.0 : 0.0; });
    const auto d0 = fd_derivative(cst, 0);
    const auto ramp = Field::sample(g, [&](std::span<const double> x) { return window(x[0]) ? 3.0 * x[0] : 0.0; });
    const auto d1 = fd_derivative(ramp, 0);
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double x = g.center(c, 0);
        if (std::abs(x) < 0.5) {
            CHECK(d0.values()[c] == 0.0);
            CHECK(d1.values()[c] == doctest::Approx(3.0).epsilon(1e-12));
        }
    }

    double err[2] = {};
    for (int level = 0; level < 2; ++level) {
        const SpaceGrid h(1, 1.0, 64u << level);
        const double k = 4.0;
        const auto s = Field::sample(h, [&](std::span<const double> x) { return std::sin(k * x[0]) * bump(x, 1.0, 0.9); });
        const auto ds = fd_derivative(s, 0);
        for (std::size_t c = 0; c < h.size(); ++c) {
            const double x = h.center(c, 0);
            if (std::abs(x) > 0.3) continue;
            // derivative of sin(kx) b(x) with b the bump of radius 0.9
            const double r2 = x * x / 0.81;
            const double b = std::exp(1.0 - 1.0 / (1.0 - r2));
            const double db = b * (-2.0 * x / 0.81) / ((1.0 - r2) * (1.0 - r2));
            const double exact = k * std::cos(k * x) * b + std::sin(k * x) * db;
            err[level] = std::max(err[level], std::abs(ds.values()[c] - exact));
        }
    }
    CHECK(err[0] < 2e-2);
    CHECK(err[1] < err[0] / 3.5);

    const auto full = Field::sample(g, [](std::span<const double>) { return 1.0; });
    CHECK_THROWS_AS(fd_derivative(full, 0), ConfigError);
}

TEST_CASE("snapshots round trip")
{
    const SpaceGrid g(2, 1.0, 5);
    const auto u = Field::sample(g, 2, [](std::span<const double> x, std::span<double> out) {
        out[0] = x[0] / 3.0;
        out[1] = -x[1];
    });
    std::stringstream bin;
    write_snapshot_binary(bin, u);
    const auto back = read_snapshot_binary(bin, g);
    CHECK(back.values() == u.values());
    std::ostringstream csv;
    write_snapshot_csv(csv, u);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "cell,component,value");
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == g.size() * 2);
    std::stringstream bad("XXXXXXXX");
    CHECK_THROWS_AS(read_snapshot_binary(bad, g), ConfigError);
}

TEST_CASE("zero drivers keep psi")
{
    FieldDrivers d;
    d.initial = [](std::span<const double> x, std::span<double> out) { out[0] = bump(x, 1.0, 0.5); };
    const SpaceGrid g(1, 1.0, 16);
    const auto ms = MarkSpace::finite_uniform(1, 1.0);
    JumpStream js;
    js.atoms.push_back({0.5, ms.nodes()[0]});
    const auto grid = merge_jump_times(TimeGrid::uniform(1.0, 3), js);
    const auto fp = build_field_path(d, ms, js, {}, g, grid, LpMode::thm21);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (std::size_t c = 0; c < g.size(); ++c) CHECK(fp.at(k).values[c] == fp.at(0).values[c]);
    }
}

TEST_CASE("deterministic indicator drift")
{
    const double c = 1.5;
    FieldDrivers d;
    d.drift = [c](double, std::span<const double> x, std::span<double> out) { out[0] = std::abs(x[0]) < 0.5 ? c : 0.0; };
    const SpaceGrid g(1, 1.0, 32);
    const auto grid = TimeGrid::uniform(1.0, 16);
    const auto fp = build_field_path(d, MarkSpace::finite_uniform(1, 0.0), {}, {}, g, grid, LpMode::thm21);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (std::size_t cell = 0; cell < g.size(); ++cell) {
            const double expected = std::abs(g.center(cell, 0)) < 0.5 ? c * grid[k] : 0.0;
            CHECK(fp.at(k).values[cell] == doctest::Approx(expected).epsilon(1e-14));
        }
    }
}

TEST_CASE("weak form is reproduced")
{
    const auto d = full_drivers(2, 2);
    const SpaceGrid g(1, 1.0, 32);
    FieldModel model{d, MarkSpace::box({0.0}, {1.0}, 3.0, 3), g, TimeGrid::uniform(1.0, 20), LpMode::thm21, 1};
    const auto fp = simulate_field_path(model, 12, 1);
    REQUIRE(fp.jumps.size() > 0);
    const ScalarPointFn phi = [](std::span<const double> x) { return bump(x, 1.0, 0.85) * (1.0 + x[0]); };
    const double vol = g.cell_volume();
    std::vector<double> x(1), v(4);
    const auto pair_fn = [&](const auto& eval, std::size_t comps) {
        std::vector<double> out(comps, 0.0);
        for (std::size_t c = 0; c < g.size(); ++c) {
            g.center(c, x);
            eval(x, std::span<double>(v.data(), comps));
            for (std::size_t i = 0; i < comps; ++i) out[i] += v[i] * phi(x) * vol;
        }
        return out;
    };
    std::vector<double> rhs = pair_fn([&](std::span<const double> y, std::span<double> o) { d.initial(y, o); }, 2);
    const auto nodes = fp.marks.nodes();
    const auto weights = fp.marks.weights();
    for (std::size_t k = 0; k < fp.grid.n_steps(); ++k) {
        const double t = fp.grid[k];
        const double dt = fp.grid.step(k);
        const auto f = pair_fn([&](std::span<const double> y, std::span<double> o) { d.drift(t, y, o); }, 2);
        const auto gg = pair_fn([&](std::span<const double> y, std::span<double> o) { d.diffusion(t, y, o); }, 4);
        const auto dw = fp.wiener.step(k);
        std::vector<double> comp(2, 0.0);
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const auto hj = pair_fn([&](std::span<const double> y, std::span<double> o) { d.jump(t, y, nodes[j], o); }, 2);
            for (std::size_t i = 0; i < 2; ++i) comp[i] += weights[j] * hj[i];
        }
        for (std::size_t i = 0; i < 2; ++i) {
            rhs[i] += f[i] * dt - comp[i] * dt;
            for (std::size_t r = 0; r < 2; ++r) rhs[i] += gg[i * 2 + r] * dw[r];
        }
        if (const auto a = fp.grid.event_at(k + 1)) {
            const auto& atom = fp.jumps.atoms[*a];
            const auto h = pair_fn([&](std::span<const double> y, std::span<double> o) { d.jump(atom.time, y, atom.mark, o); }, 2);
            for (std::size_t i = 0; i < 2; ++i) rhs[i] += h[i];
        }
    }
    Field last(g, 2, std::vector<double>(fp.at(fp.grid.size() - 1).values.begin(), fp.at(fp.grid.size() - 1).values.end()));
    const auto lhs = weak_pairing(last, phi);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-12);
}

TEST_CASE("a cell of the field is the pointwise semimartingale, bit for bit")
{
    const auto fd = full_drivers(2, 2);
    const SpaceGrid g(2, 1.0, 12);
    FieldModel model{fd, MarkSpace::box({0.0}, {1.0}, 4.0, 3), g, TimeGrid::uniform(1.0, 10), LpMode::thm21, 1};
    const auto fp = simulate_field_path(model, 21, 0);
    REQUIRE(fp.jumps.size() > 0);
    for (std::size_t cell : {std::size_t{40}, std::size_t{66}, std::size_t{77}}) {
        std::vector<double> x(2);
        g.center(cell, x);
        DriverFD d;
        d.dim = 2;
        d.n_wiener = 2;
        d.drift = [&](double t, std::span<double> out) { fd.drift(t, x, out); };
        d.diffusion = [&](double t, std::span<double> out) { fd.diffusion(t, x, out); };
        d.compensated = [&](double t, const Mark& z, std::span<double> out) { fd.jump(t, x, z, out); };
        std::vector<double> x0(2);
        fd.initial(x, x0);
        const auto path = build_path_fd(d, fp.marks, fp.jumps, fp.wiener, x0, fp.grid);
        const auto cut = restrict_to_cell(fp, cell);
        CHECK(path.values == cut.values);
        CHECK(path.left_limits == cut.left_limits);
        CHECK(path.coefficients.compensator == cut.coefficients.compensator);
        CHECK(path.coefficients.jump_square == cut.coefficients.jump_square);
    }
}

TEST_CASE("left limits are the stored pre-jump state")
{
    const SpaceGrid g(1, 1.0, 16);
    FieldModel model{full_drivers(1, 1), MarkSpace::finite_uniform(2, 3.0), g, TimeGrid::uniform(1.0, 8), LpMode::thm21, 1};
    const auto fp = simulate_field_path(model, 4, 4);
    REQUIRE(fp.jumps.size() > 0);
    for (std::size_t k = 0; k < fp.grid.size(); ++k) {
        const auto a = fp.grid.event_at(k);
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double jump = a ? fp.jump_at(*a).values[c] : 0.0;
            CHECK(fp.at(k).values[c] == fp.before(k).values[c] + jump);
        }
    }
}

TEST_CASE("shape and margin errors")
{
    const SpaceGrid g(1, 1.0, 16);
    const auto grid = TimeGrid::uniform(1.0, 2);
    const auto ms = MarkSpace::finite_uniform(1, 0.0);
    auto two = full_drivers(2, 0);
    two.diffusion = nullptr;
    CHECK_THROWS_AS(build_field_path(two, ms, {}, {}, g, grid, LpMode::thm22), ConfigError);
    auto one = full_drivers(1, 0);
    one.diffusion = nullptr;
    CHECK_THROWS_AS(build_field_path(one, ms, {}, {}, g, grid, LpMode::thm22), ConfigError);
    one.flux.push_back([](double, std::span<const double>, std::span<double> out) { out[0] = 0.0; });
    CHECK_NOTHROW(build_field_path(one, ms, {}, {}, g, grid, LpMode::thm22));
    CHECK_THROWS_AS(build_field_path(one, ms, {}, {}, g, grid, LpMode::thm21), ConfigError);

    FieldDrivers wide;
    wide.initial = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
    CHECK_THROWS_AS(build_field_path(wide, ms, {}, {}, g, grid, LpMode::thm21), ConfigError);
}
