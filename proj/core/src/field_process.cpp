#include "itolp/field_process.hpp"

#include "itolp/detail/segment.hpp"
#include "itolp/errors.hpp"
#include "itolp/rng.hpp"

#include <algorithm>

namespace itolp {

namespace {

void run_recursion(FieldPath& fp)
{
    const std::size_t dim = fp.dim;
    const std::size_t nw = fp.n_wiener;
    const std::size_t cells = fp.space.size();
    const std::size_t slice = fp.slice();
    for (std::size_t k = 0; k + 1 < fp.grid.size(); ++k) {
        const double dt = fp.grid.step(k);
        std::span<const double> dw;
        if (nw > 0) dw = fp.wiener.step(k);
        const auto event = fp.grid.event_at(k + 1);
        for (std::size_t c = 0; c < cells; ++c) {
            const std::size_t off = c * dim;
            const std::span<const double> x(fp.values.data() + k * slice + off, dim);
            std::span<double> left(fp.left_limits.data() + (k + 1) * slice + off, dim);
            detail::euler_step(x, {fp.drift.data() + k * slice + off, dim},
                               {fp.diffusion.data() + (k * slice + off) * nw, dim * nw}, dw,
                               {fp.compensator.data() + k * slice + off, dim}, dt, left);
            double* next = fp.values.data() + (k + 1) * slice + off;
            if (event) {
                const double* h = fp.jump.data() + *event * slice + off;
                for (std::size_t i = 0; i < dim; ++i) next[i] = left[i] + h[i];
            } else {
                std::copy(left.begin(), left.end(), next);
            }
        }
    }
}

}  // namespace

FieldPath build_field_path(const FieldDrivers& drivers, const MarkSpace& marks,
                           const JumpStream& jumps, const WienerBundle& wiener,
                           const SpaceGrid& space, const TimeGrid& grid, LpMode mode,
                           std::size_t margin)
{
    require_augmented(jumps, grid);
    const std::size_t dim = drivers.dim;
    const std::size_t nw = drivers.n_wiener;
    if (dim == 0) throw ConfigError("field drivers: M must be positive");
    if (mode == LpMode::thm22) {
        if (dim != 1) throw ConfigError("thm22 mode requires M = 1");
        if (drivers.flux.size() != space.dim()) {
            throw ConfigError("thm22 mode requires one flux driver f^a per space axis");
        }
    } else if (!drivers.flux.empty()) {
        throw ConfigError("flux drivers f^a (a >= 1) are only used in thm22 mode");
    }
    if (nw > 0 && (wiener.n_drivers != nw || wiener.n_steps() != grid.n_steps())) {
        throw PreconditionError("build_field_path: Wiener bundle does not match the grid/drivers");
    }

    FieldPath fp;
    fp.space = space;
    fp.grid = grid;
    fp.dim = dim;
    fp.n_wiener = nw;
    fp.mode = mode;
    fp.jumps = jumps;
    fp.wiener = wiener;
    fp.marks = marks;
    fp.drivers = drivers;

    const std::size_t cells = space.size();
    const std::size_t slice = fp.slice();
    const std::size_t steps = grid.n_steps();
    fp.values.assign(grid.size() * slice, 0.0);
    fp.left_limits.assign(grid.size() * slice, 0.0);
    fp.drift.assign(steps * slice, 0.0);
    fp.drift0.assign(steps * slice, 0.0);
    fp.diffusion.assign(steps * slice * nw, 0.0);
    fp.compensator.assign(steps * slice, 0.0);
    fp.jump_square.assign(steps * cells, 0.0);
    fp.jump.assign(jumps.size() * slice, 0.0);
    if (mode == LpMode::thm22) fp.flux.assign(steps * space.dim() * cells, 0.0);

    std::vector<double> centers(cells * space.dim());
    for (std::size_t c = 0; c < cells; ++c) {
        space.center(c, {centers.data() + c * space.dim(), space.dim()});
    }
    const auto x_of = [&](std::size_t c) {
        return std::span<const double>(centers.data() + c * space.dim(), space.dim());
    };

    if (drivers.initial) {
        for (std::size_t c = 0; c < cells; ++c) drivers.initial(x_of(c), {fp.values.data() + c * dim, dim});
    }
    require_margin(fp.at(0), margin, "initial condition psi");
    std::copy(fp.values.begin(), fp.values.begin() + static_cast<std::ptrdiff_t>(slice),
              fp.left_limits.begin());

    std::vector<double> scratch(dim);
    const auto nodes = marks.nodes();
    const auto weights = marks.weights();
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = grid[k];
        for (std::size_t c = 0; c < cells; ++c) {
            const auto x = x_of(c);
            const std::size_t off = k * slice + c * dim;
            if (drivers.drift) drivers.drift(t, x, {fp.drift0.data() + off, dim});
            if (drivers.diffusion && nw > 0) drivers.diffusion(t, x, {fp.diffusion.data() + off * nw, dim * nw});
            if (drivers.jump) {
                double* comp = fp.compensator.data() + off;
                double& square = fp.jump_square[k * cells + c];
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    drivers.jump(t, x, nodes[j], scratch);
                    for (std::size_t i = 0; i < dim; ++i) comp[i] += weights[j] * scratch[i];
                    square += weights[j] * dot(scratch, scratch);
                }
            }
        }
        std::copy_n(fp.drift0.begin() + static_cast<std::ptrdiff_t>(k * slice), slice,
                    fp.drift.begin() + static_cast<std::ptrdiff_t>(k * slice));
        if (mode == LpMode::thm22) {
            for (std::size_t a = 0; a < space.dim(); ++a) {
                if (!drivers.flux[a]) continue;
                double* f = fp.flux.data() + (k * space.dim() + a) * cells;
                for (std::size_t c = 0; c < cells; ++c) drivers.flux[a](t, x_of(c), {f + c, 1});
                const auto div = fd_derivative(fp.flux_at(k, a), a);
                for (std::size_t c = 0; c < cells; ++c) fp.drift[k * slice + c] += div.values()[c];
            }
        }
        require_margin(fp.drift_at(k), margin, "drift");
        require_margin(fp.diffusion_at(k), margin, "diffusion g");
        require_margin(fp.compensator_at(k), margin, "jump compensator");
    }

    if (drivers.jump) {
        for (std::size_t a = 0; a < jumps.size(); ++a) {
            const auto& atom = jumps.atoms[a];
            for (std::size_t c = 0; c < cells; ++c) {
                drivers.jump(atom.time, x_of(c), atom.mark, {fp.jump.data() + a * slice + c * dim, dim});
            }
            require_margin(fp.jump_at(a), margin, "jump h");
        }
    }

    run_recursion(fp);
    return fp;
}

FieldPath rebuild_field_path(FieldPath tables)
{
    run_recursion(tables);
    return tables;
}

PathFD restrict_to_cell(const FieldPath& fp, std::size_t cell)
{
    const std::size_t dim = fp.dim;
    const std::size_t nw = fp.n_wiener;
    const std::size_t slice = fp.slice();
    const std::size_t steps = fp.grid.n_steps();
    const std::size_t off = cell * dim;

    CoefficientTable tab;
    tab.dim = dim;
    tab.n_wiener = nw;
    tab.drift.resize(steps * dim);
    tab.diffusion.resize(steps * dim * nw);
    tab.compensator.resize(steps * dim);
    tab.jump_square.resize(steps);
    tab.jump.resize(fp.jumps.size() * dim);
    tab.raw_jump.assign(fp.jumps.size() * dim, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        std::copy_n(fp.drift.begin() + static_cast<std::ptrdiff_t>(k * slice + off), dim,
                    tab.drift.begin() + static_cast<std::ptrdiff_t>(k * dim));
        std::copy_n(fp.diffusion.begin() + static_cast<std::ptrdiff_t>((k * slice + off) * nw), dim * nw,
                    tab.diffusion.begin() + static_cast<std::ptrdiff_t>(k * dim * nw));
        std::copy_n(fp.compensator.begin() + static_cast<std::ptrdiff_t>(k * slice + off), dim,
                    tab.compensator.begin() + static_cast<std::ptrdiff_t>(k * dim));
        tab.jump_square[k] = fp.jump_square[k * fp.space.size() + cell];
    }
    for (std::size_t a = 0; a < fp.jumps.size(); ++a) {
        std::copy_n(fp.jump.begin() + static_cast<std::ptrdiff_t>(a * slice + off), dim,
                    tab.jump.begin() + static_cast<std::ptrdiff_t>(a * dim));
    }

    PathFD path;
    path.grid = fp.grid;
    path.dim = dim;
    path.jumps = fp.jumps;
    path.wiener = fp.wiener;
    path.values.resize(fp.grid.size() * dim);
    path.left_limits.resize(fp.grid.size() * dim);
    for (std::size_t k = 0; k < fp.grid.size(); ++k) {
        std::copy_n(fp.values.begin() + static_cast<std::ptrdiff_t>(k * slice + off), dim,
                    path.values.begin() + static_cast<std::ptrdiff_t>(k * dim));
        std::copy_n(fp.left_limits.begin() + static_cast<std::ptrdiff_t>(k * slice + off), dim,
                    path.left_limits.begin() + static_cast<std::ptrdiff_t>(k * dim));
    }
    path.coefficients = std::move(tab);
    return path;
}

FieldPath simulate_field_path(const FieldModel& model, std::uint64_t seed, std::uint64_t path_index)
{
    auto jump_rng = make_engine(seed, path_index, Stream::jumps);
    auto jumps = sample_jump_stream(model.marks, model.grid, jump_rng);
    const auto grid = merge_jump_times(model.grid, jumps);
    auto wiener_rng = make_engine(seed, path_index, Stream::wiener);
    const auto wiener = sample_wiener(grid, model.drivers.n_wiener, wiener_rng);
    return build_field_path(model.drivers, model.marks, jumps, wiener, model.space, grid, model.mode,
                            model.margin);
}

}  // namespace itolp
