#pragma once

#include "itolp/jumps.hpp"
#include "itolp/marks.hpp"
#include "itolp/semimartingale.hpp"
#include "itolp/space_grid.hpp"
#include "itolp/time_grid.hpp"
#include "itolp/wiener.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace itolp {

using FieldFn = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
using FieldMarkFn =
    std::function<void(double t, std::span<const double> x, const Mark& z, std::span<double> out)>;

/// Which form of the drift the field carries.
///   thm21: du = f dt + g^r dw^r + int h dpi~           (R^M-valued u)
///   thm22: du = (f^0 + D_a f^a) dt + g^r dw^r + int h dpi~   (M = 1, D_a f^a by
///          central differences on the grid)
enum class LpMode { thm21, thm22 };

/// Drivers of an L_p-valued process. Empty closures are zero drivers.
/// `diffusion` writes M x R_w row-major; `flux` holds f^1..f^d (scalar, thm22 only).
struct FieldDrivers {
    std::size_t dim = 1;
    std::size_t n_wiener = 0;
    FieldFn drift;
    std::vector<FieldFn> flux;
    FieldFn diffusion;
    FieldMarkFn jump;
    PointFn initial;
};

/// A sampled field path u_t(x) on (augmented time grid) x (space grid), with
/// the driver values the recursion used, frozen at left endpoints.
/// Storage: [time point][cell][component] for values / left limits;
/// [step][cell][component] for step tables; [step][axis][cell] for flux;
/// [atom][cell][component] for jumps.
struct FieldPath {
    SpaceGrid space{1, 1.0, 3};
    TimeGrid grid = TimeGrid::uniform(1.0, 1);
    std::size_t dim = 1;
    std::size_t n_wiener = 0;
    LpMode mode = LpMode::thm21;

    std::vector<double> values;
    std::vector<double> left_limits;

    std::vector<double> drift;        // effective drift of the recursion
    std::vector<double> drift0;       // f^0 (thm22); equals drift in thm21
    std::vector<double> flux;         // f^a, a = 1..d (thm22)
    std::vector<double> diffusion;
    std::vector<double> compensator;  // int_Z h(t_k, x, z) mu(dz)
    std::vector<double> jump_square;  // int_Z |h(t_k, x, z)|^2 mu(dz), [step][cell]
    std::vector<double> jump;

    JumpStream jumps;
    WienerBundle wiener;
    MarkSpace marks = MarkSpace::finite_uniform(1, 0.0);
    FieldDrivers drivers;

    std::size_t slice() const noexcept { return space.size() * dim; }
    FieldView at(std::size_t k) const noexcept
    {
        return {&space, dim, {values.data() + k * slice(), slice()}};
    }
    FieldView before(std::size_t k) const noexcept
    {
        return {&space, dim, {left_limits.data() + k * slice(), slice()}};
    }
    FieldView drift_at(std::size_t k) const noexcept
    {
        return {&space, dim, {drift.data() + k * slice(), slice()}};
    }
    FieldView drift0_at(std::size_t k) const noexcept
    {
        return {&space, dim, {drift0.data() + k * slice(), slice()}};
    }
    FieldView flux_at(std::size_t k, std::size_t axis) const noexcept
    {
        const std::size_t n = space.size();
        return {&space, 1, {flux.data() + (k * space.dim() + axis) * n, n}};
    }
    FieldView diffusion_at(std::size_t k) const noexcept
    {
        return {&space, dim * n_wiener,
                {diffusion.data() + k * slice() * n_wiener, slice() * n_wiener}};
    }
    FieldView compensator_at(std::size_t k) const noexcept
    {
        return {&space, dim, {compensator.data() + k * slice(), slice()}};
    }
    FieldView jump_at(std::size_t a) const noexcept
    {
        return {&space, dim, {jump.data() + a * slice(), slice()}};
    }
};

/// Pointwise in x, the same Euler/jump recursion as build_path_fd. All driver
/// tables and psi must vanish within `margin` cells of the boundary
/// (ConfigError otherwise). thm22 requires M = 1 and d flux closures.
FieldPath build_field_path(const FieldDrivers& drivers, const MarkSpace& marks,
                           const JumpStream& jumps, const WienerBundle& wiener,
                           const SpaceGrid& space, const TimeGrid& grid, LpMode mode,
                           std::size_t margin = 1);

/// Rebuilds the recursion from the tables already stored in `tables`
/// (values are recomputed from its initial slice).
FieldPath rebuild_field_path(FieldPath tables);

/// The R^M semimartingale t -> u_t(x_cell), with its frozen drivers.
PathFD restrict_to_cell(const FieldPath& path, std::size_t cell);

struct FieldModel {
    FieldDrivers drivers;
    MarkSpace marks = MarkSpace::finite_uniform(1, 0.0);
    SpaceGrid space{1, 1.0, 3};
    TimeGrid grid = TimeGrid::uniform(1.0, 1);
    LpMode mode = LpMode::thm21;
    std::size_t margin = 1;
};

FieldPath simulate_field_path(const FieldModel& model, std::uint64_t seed, std::uint64_t path_index);

}  // namespace itolp
