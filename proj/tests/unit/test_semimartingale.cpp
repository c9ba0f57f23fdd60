#include "itolp/calculus.hpp"
#include "itolp/errors.hpp"
#include "itolp/semimartingale.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace itolp;

namespace {

JumpStream atoms_at(std::initializer_list<double> times, const MarkSpace& ms)
{
    JumpStream js;
    for (double t : times) js.atoms.push_back({t, ms.nodes()[0]});
    return js;
}

WienerBundle no_noise()
{
    return {};
}

}  // namespace

TEST_CASE("zero drivers keep the initial value")
{
    DriverFD d;
    d.dim = 2;
    const auto ms = MarkSpace::finite_uniform(1, 1.0);
    const auto js = atoms_at({0.3, 0.6}, ms);
    const auto grid = merge_jump_times(TimeGrid::uniform(1.0, 10), js);
    const std::vector<double> x0{1.5, -2.0};
    const auto path = build_path_fd(d, ms, js, no_noise(), x0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(path.at(k)[0] == 1.5);
        CHECK(path.at(k)[1] == -2.0);
    }
    const auto b = eval_ito_fd(path, 4.0, 1.0);
    for (double t : b.terms) CHECK(t == 0.0);
    CHECK(b.residual == 0.0);
}

TEST_CASE("constant drift")
{
    DriverFD d;
    d.drift = [](double, std::span<double> out) { out[0] = 0.75; };
    const auto ms = MarkSpace::finite_uniform(1, 0.0);
    const auto grid = TimeGrid::uniform(2.0, 64);
    const std::vector<double> x0{1.0};
    const auto path = build_path_fd(d, ms, {}, no_noise(), x0, grid);
    CHECK(path.at(64)[0] == doctest::Approx(1.0 + 0.75 * 2.0).epsilon(1e-14));
    const auto b = eval_ito_fd(path, 3.0, 2.0);
    CHECK(std::abs(b.residual) <= 1e-12 * (1.0 + b.lhs));
}

TEST_CASE("single raw jump")
{
    DriverFD d;
    d.dim = 2;
    d.raw = [](double, const Mark&, std::span<double> out) {
        out[0] = 0.5;
        out[1] = -1.0;
    };
    const auto ms = MarkSpace::finite_uniform(1, 1.0);
    const auto js = atoms_at({0.35}, ms);
    const auto grid = merge_jump_times(TimeGrid::uniform(1.0, 4), js);
    const std::vector<double> x0{1.0, 1.0};
    const auto path = build_path_fd(d, ms, js, no_noise(), x0, grid);
    const std::size_t tau = grid.point_of_event(0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(path.at(k)[0] == (k >= tau ? 1.5 : 1.0));
        CHECK(path.at(k)[1] == (k >= tau ? 0.0 : 1.0));
    }
    CHECK(path.before(tau)[0] == 1.0);
    const auto b = eval_ito_fd(path, 2.0, 1.0);
    CHECK(b[FdTerm::raw_jump] == doctest::Approx(1.5 * 1.5 - 2.0));
    CHECK(b.residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("orthogonality violation names (t, z)")
{
    DriverFD d;
    d.compensated = [](double, const Mark&, std::span<double> out) { out[0] = 1.0; };
    d.raw = [](double, const Mark&, std::span<double> out) { out[0] = 1.0; };
    const auto ms = MarkSpace::finite_set({2.5}, {1.0});
    const auto js = atoms_at({0.5}, ms);
    const auto grid = merge_jump_times(TimeGrid::uniform(1.0, 4), js);
    const std::vector<double> x0{0.0};
    try {
        build_path_fd(d, ms, js, no_noise(), x0, grid);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("t=") != std::string::npos);
        CHECK(msg.find("2.5") != std::string::npos);
    }
}

TEST_CASE("orthogonal supports are accepted")
{
    DriverFD d;
    d.compensated = [](double, const Mark& z, std::span<double> out) { out[0] = z[0] < 0.5 ? 1.0 : 0.0; };
    d.raw = [](double, const Mark& z, std::span<double> out) { out[0] = z[0] < 0.5 ? 0.0 : 2.0; };
    const auto ms = MarkSpace::finite_set({0.0, 1.0}, {1.0, 1.0});
    JumpStream js;
    js.atoms.push_back({0.2, ms.nodes()[0]});
    js.atoms.push_back({0.7, ms.nodes()[1]});
    const auto grid = merge_jump_times(TimeGrid::uniform(1.0, 8), js);
    const std::vector<double> x0{0.5};
    const auto path = build_path_fd(d, ms, js, no_noise(), x0, grid);
    for (double p : {2.0, 3.0, 4.0}) {
        const auto b = eval_ito_fd(path, p, 1.0);
        CHECK(std::abs(b.residual) <= 1e-10 * (1.0 + std::abs(b.lhs)));
    }
}

TEST_CASE("pure-jump telescoping at p = 2")
{
    const double c = 0.8;
    DriverFD d;
    d.compensated = [c](double, const Mark&, std::span<double> out) { out[0] = c; };
    const auto ms = MarkSpace::finite_uniform(1, 2.0);
    const auto js = atoms_at({0.1, 0.45, 0.8}, ms);
    const auto grid = merge_jump_times(TimeGrid::uniform(1.0, 16), js);
    const std::vector<double> x0{0.3};
    const auto path = build_path_fd(d, ms, js, no_noise(), x0, grid);
    const auto b = eval_ito_fd(path, 2.0, 1.0);
    CHECK(b[FdTerm::remainder_jump] == doctest::Approx(3.0 * c * c).epsilon(1e-14));
    double jumps_part = 0.0;
    for (std::size_t a = 0; a < 3; ++a) jumps_part += 2.0 * path.before(grid.point_of_event(a))[0] * c;
    // the compensator part is -int 2 X c lambda ds along the piecewise linear path
    CHECK(b[FdTerm::compensated_jump] < jumps_part);
    CHECK(std::abs(b.residual) <= 1e-12);
    // X_T = x0 + 3c - c lambda T
    CHECK(path.at(grid.size() - 1)[0] == doctest::Approx(0.3 + 3.0 * c - 2.0 * c).epsilon(1e-14));
}

TEST_CASE("general jet and p-power evaluations agree")
{
    DriverFD d;
    d.dim = 2;
    d.n_wiener = 2;
    d.drift = [](double t, std::span<double> out) {
        out[0] = std::cos(t);
        out[1] = -0.5;
    };
    d.diffusion = [](double t, std::span<double> out) {
        out[0] = 0.4;
        out[1] = 0.1 * t;
        out[2] = -0.2;
        out[3] = 0.3;
    };
    d.compensated = [](double, const Mark& z, std::span<double> out) {
        out[0] = 0.3 * z[0];
        out[1] = z[0] > 0.5 ? 0.0 : -0.4;
    };
    FdModel model{d, MarkSpace::box({0.0}, {1.0}, 2.0, 4), TimeGrid::uniform(1.0, 32), {0.2, -0.1}};
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto path = simulate_path_fd(model, 17, i);
        for (double p : {2.0, 3.0, 4.5}) {
            const PNormJet jet(p);
            const auto a = eval_ito_fd(path, jet, 1.0);
            const auto b = eval_ito_fd(path, p, 1.0);
            CHECK(a.lhs == b.lhs);
            for (std::size_t j = 0; j < 6; ++j) {
                CHECK(std::abs(a.terms[j] - b.terms[j]) <= 1e-11 * (1.0 + std::abs(b.lhs)));
            }
        }
    }
    const auto path = simulate_path_fd(model, 17, 0);
    CHECK_THROWS_AS(eval_ito_fd(path, 2.0, 0.51234), DomainError);
    CHECK_THROWS_AS(eval_ito_fd(path, 1.0, 1.0), DomainError);
}

TEST_CASE("left limits differ from values only at atoms")
{
    DriverFD d;
    d.n_wiener = 1;
    d.diffusion = [](double, std::span<double> out) { out[0] = 1.0; };
    d.compensated = [](double, const Mark&, std::span<double> out) { out[0] = 0.5; };
    FdModel model{d, MarkSpace::finite_uniform(1, 4.0), TimeGrid::uniform(1.0, 16), {0.0}};
    const auto path = simulate_path_fd(model, 5, 2);
    REQUIRE(path.jumps.size() > 0);
    for (std::size_t k = 0; k < path.grid.size(); ++k) {
        if (const auto a = path.grid.event_at(k)) {
            CHECK(path.at(k)[0] == path.before(k)[0] + 0.5);
        } else {
            CHECK(path.at(k)[0] == path.before(k)[0]);
        }
    }
}

TEST_CASE("pure-jump exactness for random atoms")
{
    for (std::size_t m = 1; m <= 3; ++m) {
        DriverFD d;
        d.dim = m;
        d.compensated = [m](double t, const Mark& z, std::span<double> out) {
            for (std::size_t i = 0; i < m; ++i) out[i] = std::sin(static_cast<double>(i + 1) * z[0] + t) - 0.2;
        };
        FdModel model{d, MarkSpace::box({-1.0}, {1.0}, 5.0, 6), TimeGrid::uniform(1.0, 8),
                      std::vector<double>(m, 0.4)};
        for (std::uint64_t i = 0; i < 10; ++i) {
            const auto path = simulate_path_fd(model, 31, i);
            for (double p : {2.0, 3.0, 4.0, 6.0}) {
                const auto b = eval_ito_fd(path, p, 1.0);
                CHECK(std::abs(b.residual) <= 1e-10 * (1.0 + std::abs(b.lhs)));
            }
        }
    }
}

TEST_CASE("energy identity statistics")
{
    SUBCASE("zero drivers give a zero gap")
    {
        FdModel model{DriverFD{}, MarkSpace::finite_uniform(1, 0.0), TimeGrid::uniform(1.0, 4), {1.0}};
        const auto s = energy_identity_stat(model, 50, 1);
        CHECK(s.mean == 0.0);
        CHECK(s.std_err == 0.0);
    }
    SUBCASE("unit diffusion: E|X_T|^2 = 1")
    {
        DriverFD d;
        d.n_wiener = 1;
        d.diffusion = [](double, std::span<double> out) { out[0] = 1.0; };
        FdModel model{d, MarkSpace::finite_uniform(1, 0.0), TimeGrid::uniform(1.0, 8), {0.0}};
        const auto s = energy_identity_stat(model, 10000, 2);
        CHECK(s.within(3.0));
    }
    SUBCASE("compensated Poisson: E|X_T|^2 = T")
    {
        DriverFD d;
        d.compensated = [](double, const Mark&, std::span<double> out) { out[0] = 1.0; };
        FdModel model{d, MarkSpace::finite_uniform(1, 1.0), TimeGrid::uniform(1.0, 8), {0.0}};
        const auto s = energy_identity_stat(model, 10000, 3);
        CHECK(s.within(3.0));
    }
}

TEST_CASE("clipping bounds the jump driver")
{
    DriverFD d;
    d.compensated = [](double, const Mark& z, std::span<double> out) { out[0] = 10.0 * z[0]; };
    const auto c = clip_jumps(d, 2.0);
    const auto ms = MarkSpace::finite_set({-1.0, 0.1, 1.0}, {1.0, 1.0, 1.0});
    std::vector<double> out(1);
    c.compensated(0.0, ms.nodes()[0], out);
    CHECK(out[0] == -2.0);
    c.compensated(0.0, ms.nodes()[1], out);
    CHECK(out[0] == 1.0);
    c.compensated(0.0, ms.nodes()[2], out);
    CHECK(out[0] == 2.0);
}

TEST_CASE("coupled refinement reduces the median residual")
{
    DriverFD d;
    d.dim = 2;
    d.n_wiener = 2;
    d.diffusion = [](double, std::span<double> out) {
        out[0] = 1.0;
        out[1] = 0.3;
        out[2] = -0.2;
        out[3] = 0.8;
    };
    FdModel model{d, MarkSpace::finite_uniform(1, 0.0), TimeGrid::uniform(1.0, 8), {0.5, 0.5}};
    const std::size_t levels[] = {16, 64, 256};
    const auto study = refinement_study(model, 4.0, levels, 40, 8);
    REQUIRE(study.size() == 3);
    CHECK(study[1].median < study[0].median);
    CHECK(study[2].median < study[1].median);
    // rate about dt^{1/2}: a factor 4 in steps roughly halves the residual
    CHECK(study[2].median < 0.8 * study[0].median);
}
