#include "itolp/wiener.hpp"

#include "itolp/errors.hpp"

#include <cmath>

namespace itolp {

WienerBundle sample_wiener(const TimeGrid& grid, std::size_t n_drivers, Engine& rng)
{
    WienerBundle wb;
    wb.n_drivers = n_drivers;
    if (n_drivers == 0) return wb;
    wb.increments.resize(grid.n_steps() * n_drivers);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double sd = std::sqrt(grid.step(k));
        for (std::size_t r = 0; r < n_drivers; ++r) {
            wb.increments[k * n_drivers + r] = sd * gauss(rng);
        }
    }
    return wb;
}

WienerBundle coarsen_wiener(const WienerBundle& fine, const TimeGrid& fine_grid,
                            const TimeGrid& coarse_grid)
{
    if (!fine_grid.refines(coarse_grid)) {
        throw PreconditionError("coarsen_wiener: coarse grid is not contained in the fine grid");
    }
    WienerBundle wb;
    wb.n_drivers = fine.n_drivers;
    if (fine.n_drivers == 0) return wb;
    wb.increments.assign(coarse_grid.n_steps() * fine.n_drivers, 0.0);
    std::size_t f = 0;
    for (std::size_t k = 0; k < coarse_grid.n_steps(); ++k) {
        while (fine_grid[f] < coarse_grid[k + 1]) {
            for (std::size_t r = 0; r < fine.n_drivers; ++r) {
                wb.increments[k * fine.n_drivers + r] += fine.increments[f * fine.n_drivers + r];
            }
            ++f;
        }
    }
    return wb;
}

double wiener_integral(const std::function<double(double t, std::size_t r)>& integrand,
                       const WienerBundle& wiener, const TimeGrid& grid, double t)
{
    if (wiener.n_drivers == 0) return 0.0;
    const std::size_t end = grid.index_of(t);
    double total = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        const auto dw = wiener.step(k);
        for (std::size_t r = 0; r < wiener.n_drivers; ++r) total += integrand(grid[k], r) * dw[r];
    }
    return total;
}

}  // namespace itolp
