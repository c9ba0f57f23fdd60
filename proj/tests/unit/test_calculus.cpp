#include "itolp/calculus.hpp"
#include "itolp/errors.hpp"
#include "itolp/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace itolp;

namespace {

std::vector<double> v(std::initializer_list<double> x)
{
    return x;
}

}  // namespace

TEST_CASE("gradient of |x|^p")
{
    const auto g1 = p_norm_grad(2.0, v({3.0, 4.0}));
    CHECK(g1[0] == 6.0);
    CHECK(g1[1] == 8.0);
    const auto g2 = p_norm_grad(4.0, v({1.0, 0.0}));
    CHECK(g2[0] == 4.0);
    CHECK(g2[1] == 0.0);
    const auto g3 = p_norm_grad(3.0, v({0.0, 0.0}));
    CHECK(g3[0] == 0.0);
    CHECK(g3[1] == 0.0);
    CHECK_THROWS_AS(p_norm_grad(1.5, v({1.0})), DomainError);
    CHECK_THROWS_AS(PNormJet(1.99), DomainError);
}

TEST_CASE("zero point conventions")
{
    CHECK(guarded_pow(0.0, -1.0) == 0.0);
    CHECK(guarded_pow(0.0, 0.0) == 1.0);
    CHECK(guarded_pow(0.0, 0.5) == 0.0);
    const PNormJet jet(3.0);
    const auto zero = v({0.0, 0.0});
    const auto a = v({1.0, 2.0});
    CHECK(jet.value(zero) == 0.0);
    CHECK(jet.hessian_contract(zero, a, a) == 0.0);
    const PNormJet two(2.0);
    CHECK(two.hessian_contract(zero, a, a) == 2.0 * 5.0);
}

TEST_CASE("increment operator")
{
    const PNormJet p2(2.0), p4(4.0);
    CHECK(i_operator(p2, v({1.0, 0.0}), v({1.0, 0.0})) == 3.0);
    CHECK(i_operator(p2, v({0.3, -2.0}), v({0.0, 0.0})) == 0.0);
    CHECK(i_operator(p4, v({1.0}), v({1.0})) == 15.0);
}

TEST_CASE("Taylor remainder operator")
{
    const PNormJet p2(2.0), p4(4.0);
    CHECK(j_operator(p4, v({1.0}), v({1.0})) == 11.0);
    CHECK(j_operator(p4, v({0.7, 0.1}), v({0.0, 0.0})) == 0.0);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const auto x = v({n(rng), n(rng), n(rng)});
        const auto a = v({n(rng), n(rng), n(rng)});
        CHECK(j_operator(p2, x, a) == doctest::Approx(dot(a, a)).epsilon(1e-12));
        for (double p : {2.5, 3.0, 6.0}) {
            const PNormJet jet(p);
            std::vector<double> g(3);
            jet.gradient(x, g);
            CHECK(j_operator(jet, x, a) == i_operator(jet, x, a) - dot(g, a));
        }
    }
}

TEST_CASE("gradient and Hessian against finite differences")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> lr(std::log(0.1), std::log(10.0));
    const double h = 1e-5;
    for (double p : {2.0, 2.5, 3.0, 4.0, 6.0}) {
        const PNormJet jet(p);
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x{u(rng), u(rng)};
            const double scale = std::exp(lr(rng)) / norm(x);
            for (double& c : x) c *= scale;
            std::vector<double> g(2), fd(2), xp(2), xm(2);
            jet.gradient(x, g);
            for (std::size_t j = 0; j < 2; ++j) {
                xp = x;
                xm = x;
                xp[j] += h;
                xm[j] -= h;
                fd[j] = (jet.value(xp) - jet.value(xm)) / (2.0 * h);
            }
            std::vector<double> diff{g[0] - fd[0], g[1] - fd[1]};
            CHECK(norm(diff) <= 1e-6 * norm(g));

            const std::vector<double> a{u(rng), u(rng)}, b{u(rng), u(rng)};
            std::vector<double> gp(2), gm(2);
            for (std::size_t j = 0; j < 2; ++j) {
                xp[j] = x[j] + h * b[j];
                xm[j] = x[j] - h * b[j];
            }
            jet.gradient(xp, gp);
            jet.gradient(xm, gm);
            const double fd_hess = (dot(gp, a) - dot(gm, a)) / (2.0 * h);
            const double exact = jet.hessian_contract(x, a, b);
            const double mag = jet.hessian_operator_norm(x) * norm(a) * norm(b);
            CHECK(std::abs(fd_hess - exact) <= 1e-6 * mag);
        }
    }
}

TEST_CASE("remainder bound")
{
    const auto zero = j_bound_check(3.0, v({1.0, 1.0}), v({0.0, 0.0}));
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.holds());

    CHECK(taylor_constant(2.0) >= 0.5);
    const auto b = j_bound_check(2.0, v({1.0}), v({2.0}));
    CHECK(b.lhs == 4.0);
    CHECK(b.rhs == doctest::Approx(taylor_constant(2.0) * 8.0));
    CHECK(b.holds());

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pu(2.0, 8.0);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> lr(-6.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
        const double p = pu(rng);
        const std::size_t m = 1 + static_cast<std::size_t>(i % 3);
        std::vector<double> x(m), a(m);
        const double sx = std::exp(lr(rng)), sa = std::exp(lr(rng));
        for (std::size_t j = 0; j < m; ++j) {
            x[j] = sx * n(rng);
            a[j] = sa * n(rng);
        }
        const auto r = j_bound_check(p, x, a);
        CHECK(r.holds());
    }
}

TEST_CASE("closure jets")
{
    // phi(x) = x0^2 x1
    const ClosureJet phi(
        [](std::span<const double> x) { return x[0] * x[0] * x[1]; },
        [](std::span<const double> x, std::span<double> g) {
            g[0] = 2.0 * x[0] * x[1];
            g[1] = x[0] * x[0];
        },
        [](std::span<const double> x, std::span<const double> a, std::span<const double> b) {
            return 2.0 * x[1] * a[0] * b[0] + 2.0 * x[0] * (a[0] * b[1] + a[1] * b[0]);
        });
    CHECK(i_operator(phi, v({1.0, 2.0}), v({1.0, 0.0})) == 6.0);
    CHECK(j_operator(phi, v({1.0, 2.0}), v({1.0, 0.0})) == 2.0);
}
