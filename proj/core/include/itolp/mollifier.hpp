#pragma once

#include "itolp/field_process.hpp"
#include "itolp/space_grid.hpp"

#include <cstddef>
#include <vector>

namespace itolp {

/// Grid weights of k_eps(y) = eps^{-d} k(y / eps) for the bump
/// k(x) = exp(-1 / (1 - |x|^2)) on |x| < 1, rescaled to sum to 1 on the grid.
class MollKernel {
public:
    /// ConfigError unless eps >= 2 * spacing.
    MollKernel(const SpaceGrid& grid, double eps);

    const SpaceGrid& grid() const noexcept { return grid_; }
    double eps() const noexcept { return eps_; }
    /// Stencil half-width in cells.
    std::size_t radius() const noexcept { return radius_; }
    std::size_t size() const noexcept { return weights_.size(); }
    /// Offset of stencil entry j along `axis`, in cells.
    long offset(std::size_t j, std::size_t axis) const noexcept { return offsets_[j * grid_.dim() + axis]; }
    double weight(std::size_t j) const noexcept { return weights_[j]; }

    /// L_q norm of the grid density weight / cell volume, q >= 1.
    double lq_norm(double q) const;

private:
    SpaceGrid grid_;
    double eps_;
    std::size_t radius_ = 0;
    std::vector<long> offsets_;
    std::vector<double> weights_;
};

/// u^(eps)(x) = sum_j w_j u(x - o_j h). The field must vanish within
/// radius() cells of the boundary (ConfigError otherwise).
Field mollify(FieldView u, const MollKernel& kernel);

/// Driver closures smoothed with the same stencil: f^(eps)(t, x) = sum_j w_j f(t, x - o_j h).
FieldDrivers mollify_drivers(const FieldDrivers& drivers, const MollKernel& kernel);

/// Mollifies every slice of the path (values, left limits, every driver
/// table) and the drivers themselves; jump_square is recomputed from the
/// mollified jump closure.
FieldPath mollify_pathwise(const FieldPath& path, const MollKernel& kernel);

}  // namespace itolp
