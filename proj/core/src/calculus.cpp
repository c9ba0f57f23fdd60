#include "itolp/calculus.hpp"

#include "itolp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace itolp {

namespace {

void require_p(double p)
{
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw DomainError("p must be a finite real >= 2, got " + std::to_string(p));
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> x) noexcept
{
    return std::sqrt(dot(x, x));
}

double guarded_pow(double r, double e) noexcept
{
    if (r == 0.0) return e == 0.0 ? 1.0 : 0.0;
    if (e == 0.0) return 1.0;
    if (e == 1.0) return r;
    if (e == 2.0) return r * r;
    return std::pow(r, e);
}

PNormJet::PNormJet(double p) : p_(p)
{
    require_p(p);
}

double PNormJet::value(std::span<const double> x) const
{
    return guarded_pow(norm(x), p_);
}

void PNormJet::gradient(std::span<const double> x, std::span<double> out) const
{
    const double c = p_ * guarded_pow(norm(x), p_ - 2.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
}

double PNormJet::hessian_contract(std::span<const double> x, std::span<const double> a,
                                  std::span<const double> b) const
{
    const double r = norm(x);
    const double cross = p_ == 2.0 ? 0.0
                                   : p_ * (p_ - 2.0) * guarded_pow(r, p_ - 4.0) * dot(x, a) * dot(x, b);
    return cross + p_ * guarded_pow(r, p_ - 2.0) * dot(a, b);
}

double PNormJet::hessian_operator_norm(std::span<const double> x) const
{
    return p_ * (p_ - 1.0) * guarded_pow(norm(x), p_ - 2.0);
}

std::vector<double> p_norm_grad(double p, std::span<const double> x)
{
    std::vector<double> g(x.size());
    PNormJet(p).gradient(x, g);
    return g;
}

double i_operator(const C2Function& phi, std::span<const double> v, std::span<const double> a)
{
    std::array<double, 16> small{};
    std::vector<double> big;
    std::span<double> va;
    if (v.size() <= small.size()) {
        va = std::span<double>(small.data(), v.size());
    } else {
        big.resize(v.size());
        va = big;
    }
    for (std::size_t i = 0; i < v.size(); ++i) va[i] = v[i] + a[i];
    return phi.value(va) - phi.value(v);
}

double j_operator(const C2Function& phi, std::span<const double> v, std::span<const double> a)
{
    std::vector<double> grad(v.size());
    phi.gradient(v, grad);
    return i_operator(phi, v, a) - dot(grad, a);
}

double taylor_constant(double p)
{
    require_p(p);
    static std::mutex mutex;
    static std::map<double, double> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(p); it != cache.end()) return it->second;
    }

    const PNormJet phi(p);
    constexpr int kSegment = 64;
    constexpr int kRatios = 61;
    constexpr int kAngles = 33;
    // v = 0 (|a| = 1): the segment sup is attained at a.
    double worst = 0.5 * p * (p - 1.0) / (guarded_pow(0.0, p - 2.0) + 1.0);
    for (int ir = 0; ir < kRatios; ++ir) {
        const double r = std::pow(10.0, -3.0 + 6.0 * ir / (kRatios - 1));
        for (int ia = 0; ia < kAngles; ++ia) {
            const double theta = std::numbers::pi * ia / (kAngles - 1);
            const std::array<double, 2> v{1.0, 0.0};
            const std::array<double, 2> a{r * std::cos(theta), r * std::sin(theta)};
            double sup = 0.0;
            for (int s = 0; s < kSegment; ++s) {
                const double w = static_cast<double>(s) / (kSegment - 1);
                const std::array<double, 2> y{v[0] + w * a[0], v[1] + w * a[1]};
                sup = std::max(sup, phi.hessian_operator_norm(y));
            }
            const double bound = 0.5 * sup * r * r;
            const double denom = r * r + guarded_pow(r, p);
            worst = std::max(worst, bound / denom);
        }
    }
    const double n = 1.1 * worst;
    std::lock_guard lock(mutex);
    cache.emplace(p, n);
    return n;
}

BoundCheck j_bound_check(double p, std::span<const double> v, std::span<const double> a)
{
    const PNormJet phi(p);
    const double na = norm(a);
    BoundCheck out;
    out.lhs = std::abs(j_operator(phi, v, a));
    out.rhs = taylor_constant(p) * (guarded_pow(norm(v), p - 2.0) * na * na + guarded_pow(na, p));
    return out;
}

}  // namespace itolp
