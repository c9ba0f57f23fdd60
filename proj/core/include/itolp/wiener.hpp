#pragma once

#include "itolp/rng.hpp"
#include "itolp/time_grid.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace itolp {

/// Increments of R_w independent Wiener processes over the steps of a grid,
/// stored step-major: increments[k * n_drivers + r] = w^r(t_{k+1}) - w^r(t_k).
struct WienerBundle {
    std::size_t n_drivers = 0;
    std::vector<double> increments;

    std::size_t n_steps() const noexcept
    {
        return n_drivers == 0 ? 0 : increments.size() / n_drivers;
    }
    std::span<const double> step(std::size_t k) const noexcept
    {
        return {increments.data() + k * n_drivers, n_drivers};
    }
};

/// Gaussian increments with variance equal to the step length.
WienerBundle sample_wiener(const TimeGrid& grid, std::size_t n_drivers, Engine& rng);

/// Increments on `coarse` obtained by summing the fine increments it spans.
/// Every point of `coarse` must be a point of `fine`.
WienerBundle coarsen_wiener(const WienerBundle& fine, const TimeGrid& fine_grid,
                            const TimeGrid& coarse_grid);

/// Elementary Ito integral sum_k sum_r integrand(t_k, r) (w^r(t_{k+1}) - w^r(t_k))
/// over steps ending at or before t.
double wiener_integral(const std::function<double(double t, std::size_t r)>& integrand,
                       const WienerBundle& wiener, const TimeGrid& grid, double t);

}  // namespace itolp
