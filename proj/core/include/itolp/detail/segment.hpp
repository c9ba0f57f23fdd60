#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace itolp::detail {

inline constexpr double kSegmentTol = 1e-13;
inline constexpr unsigned kSegmentDepth = 12;

/// 15-point Kronrod estimate on [a, b] and |Kronrod - Gauss(7)|, with the node
/// and weight tables from boost.
template <class G>
std::pair<double, double> kronrod15(G& g, double a, double b)
{
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = g(c);
    double k = wk[0] * f0;
    double gs = wg[0] * f0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double pair = g(c - h * x[i]) + g(c + h * x[i]);
        k += wk[i] * pair;
        if (i % 2 == 0) gs += wg[i / 2] * pair;
    }
    return {h * k, std::abs(h * (k - gs))};
}

/// Adaptive bisection on [a, b]. A piece is accepted when |K - G| is below
/// tol * max(|estimate|, magnitude * length), where magnitude is the largest
/// value the integrand reported through `mag` (the size of its terms before
/// cancellation).
template <class G>
double adaptive_piece(G& g, const double& magnitude, double a, double b, unsigned depth)
{
    const auto [est, err] = kronrod15(g, a, b);
    const double floor = kSegmentTol * std::max(std::abs(est), magnitude * (b - a));
    if (depth == 0 || err <= floor) return est;
    const double mid = 0.5 * (a + b);
    return adaptive_piece(g, magnitude, a, mid, depth - 1) + adaptive_piece(g, magnitude, mid, b, depth - 1);
}

/// int_0^1 fn(theta) dtheta over the pieces [0, b_1], ..., [b_n, 1] (`breaks`
/// sorted in (0, 1)). Used for ds-integrals along the scheme's within-step path
/// x(theta) = x_k + theta (x_{k+1}^- - x_k). fn is either double(double) or
/// double(double theta, double& mag), the latter adding the absolute size of
/// its terms to mag.
template <class Fn>
double segment_integral(Fn&& fn, std::span<const double> breaks = {})
{
    double magnitude = 0.0;
    const auto g = [&](double theta) {
        if constexpr (std::is_invocable_v<Fn&, double, double&>) {
            double mag = 0.0;
            const double v = fn(theta, mag);
            magnitude = std::max(magnitude, mag);
            return v;
        } else {
            const double v = fn(theta);
            magnitude = std::max(magnitude, std::abs(v));
            return v;
        }
    };
    double s = 0.0;
    double a = 0.0;
    for (double b : breaks) {
        s += adaptive_piece(g, magnitude, a, b, kSegmentDepth);
        a = b;
    }
    return s + adaptive_piece(g, magnitude, a, 1.0, kSegmentDepth);
}

/// theta in (0, 1) where a component of a + theta (b - a) changes sign; |.|^{p-2}
/// is not smooth there unless p is an even integer.
inline void sign_changes(std::span<const double> a, std::span<const double> b, std::vector<double>& out)
{
    out.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] < 0.0 && b[i] > 0.0) || (a[i] > 0.0 && b[i] < 0.0)) {
            const double theta = a[i] / (a[i] - b[i]);
            if (theta > 0.0 && theta < 1.0) out.push_back(theta);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

inline bool even_power(double p) noexcept
{
    return std::fmod(p, 2.0) == 0.0;
}

inline void lerp(std::span<const double> a, std::span<const double> b, double theta,
                 std::span<double> out) noexcept
{
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + theta * (b[i] - a[i]);
}

inline bool all_zero(std::span<const double> v) noexcept
{
    for (double x : v) {
        if (x != 0.0) return false;
    }
    return true;
}

/// One Euler-Maruyama step between atoms:
///   out = x + drift dt + sum_r g^r dw^r - compensator dt
/// (diffusion stored row-major [i][r]). Shared by the R^M and field builders so
/// their recursions agree bit for bit.
inline void euler_step(std::span<const double> x, std::span<const double> drift,
                       std::span<const double> diffusion, std::span<const double> dw,
                       std::span<const double> compensator, double dt,
                       std::span<double> out) noexcept
{
    const std::size_t n_wiener = dw.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = x[i] + drift[i] * dt;
        for (std::size_t r = 0; r < n_wiener; ++r) v += diffusion[i * n_wiener + r] * dw[r];
        v -= compensator[i] * dt;
        out[i] = v;
    }
}

}  // namespace itolp::detail
