#include "itolp/semimartingale.hpp"

#include "itolp/detail/segment.hpp"
#include "itolp/errors.hpp"
#include "itolp/parallel.hpp"
#include "itolp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace itolp {

namespace {

std::string describe(double t, const Mark& z)
{
    std::ostringstream os;
    os.precision(17);
    os << "(t=" << t << ", z=(";
    for (std::size_t i = 0; i < z.dim; ++i) os << (i ? "," : "") << z[i];
    os << "))";
    return os.str();
}

void check_orthogonal(const DriverFD& d, double t, const Mark& z, std::span<double> hb,
                      std::span<double> hh)
{
    d.raw(t, z, hb);
    d.compensated(t, z, hh);
    for (double a : hb) {
        for (double b : hh) {
            if (a * b != 0.0) {
                throw PreconditionError("jump integrands not orthogonal (h-bar^i h^j != 0) at " +
                                        describe(t, z));
            }
        }
    }
}

// Columns g^{. r} of a row-major M x R matrix.
void columns(std::span<const double> g, std::size_t dim, std::size_t n_wiener,
             std::vector<double>& out)
{
    out.resize(dim * n_wiener);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t r = 0; r < n_wiener; ++r) out[r * dim + i] = g[i * n_wiener + r];
    }
}

}  // namespace

double TermBreakdown::sum() const
{
    double s = 0.0;
    for (double v : terms) s += v;
    return s;
}

CoefficientTable tabulate_drivers(const DriverFD& drivers, const MarkSpace& marks,
                                  const JumpStream& jumps, const TimeGrid& grid)
{
    require_augmented(jumps, grid);
    const std::size_t dim = drivers.dim;
    const std::size_t nw = drivers.n_wiener;
    const std::size_t n = grid.n_steps();

    CoefficientTable tab;
    tab.dim = dim;
    tab.n_wiener = nw;
    tab.drift.assign(n * dim, 0.0);
    tab.diffusion.assign(n * dim * nw, 0.0);
    tab.compensator.assign(n * dim, 0.0);
    tab.jump_square.assign(n, 0.0);
    tab.jump.assign(jumps.size() * dim, 0.0);
    tab.raw_jump.assign(jumps.size() * dim, 0.0);

    std::vector<double> scratch(dim);
    const auto nodes = marks.nodes();
    const auto weights = marks.weights();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = grid[k];
        if (drivers.drift) drivers.drift(t, {tab.drift.data() + k * dim, dim});
        if (drivers.diffusion && nw > 0) {
            drivers.diffusion(t, {tab.diffusion.data() + k * dim * nw, dim * nw});
        }
        if (drivers.compensated) {
            double* comp = tab.compensator.data() + k * dim;
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                drivers.compensated(t, nodes[j], scratch);
                for (std::size_t i = 0; i < dim; ++i) comp[i] += weights[j] * scratch[i];
                tab.jump_square[k] += weights[j] * dot(scratch, scratch);
            }
        }
    }

    for (std::size_t a = 0; a < jumps.size(); ++a) {
        const auto& atom = jumps.atoms[a];
        if (drivers.compensated) drivers.compensated(atom.time, atom.mark, {tab.jump.data() + a * dim, dim});
        if (drivers.raw) drivers.raw(atom.time, atom.mark, {tab.raw_jump.data() + a * dim, dim});
    }

    if (drivers.compensated && drivers.raw) {
        std::vector<double> hb(dim);
        std::vector<double> hh(dim);
        for (const auto& atom : jumps.atoms) {
            check_orthogonal(drivers, atom.time, atom.mark, hb, hh);
            for (double t : grid.points()) check_orthogonal(drivers, t, atom.mark, hb, hh);
        }
    }
    return tab;
}

PathFD build_path_fd(CoefficientTable coefficients, const JumpStream& jumps,
                     const WienerBundle& wiener, std::span<const double> x0,
                     const TimeGrid& grid)
{
    require_augmented(jumps, grid);
    const std::size_t dim = coefficients.dim;
    const std::size_t nw = coefficients.n_wiener;
    if (x0.size() != dim) throw ConfigError("build_path_fd: X0 has the wrong dimension");
    if (nw > 0 && (wiener.n_drivers != nw || wiener.n_steps() != grid.n_steps())) {
        throw PreconditionError("build_path_fd: Wiener bundle does not match the grid/drivers");
    }
    if (coefficients.drift.size() != grid.n_steps() * dim) {
        throw PreconditionError("build_path_fd: coefficient table does not match the grid");
    }

    PathFD path;
    path.grid = grid;
    path.dim = dim;
    path.jumps = jumps;
    path.wiener = wiener;
    path.values.resize(grid.size() * dim);
    path.left_limits.resize(grid.size() * dim);
    std::copy(x0.begin(), x0.end(), path.values.begin());
    std::copy(x0.begin(), x0.end(), path.left_limits.begin());

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        std::span<const double> dw;
        if (nw > 0) dw = wiener.step(k);
        std::span<double> left(path.left_limits.data() + (k + 1) * dim, dim);
        detail::euler_step(path.at(k), coefficients.drift_at(k), coefficients.diffusion_at(k), dw,
                           coefficients.compensator_at(k), grid.step(k), left);
        std::span<double> next(path.values.data() + (k + 1) * dim, dim);
        std::copy(left.begin(), left.end(), next.begin());
        if (const auto a = grid.event_at(k + 1)) {
            const auto hb = coefficients.raw_jump_at(*a);
            const auto hh = coefficients.jump_at(*a);
            for (std::size_t i = 0; i < dim; ++i) next[i] = left[i] + (hb[i] + hh[i]);
        }
    }
    path.coefficients = std::move(coefficients);
    return path;
}

PathFD build_path_fd(const DriverFD& drivers, const MarkSpace& marks, const JumpStream& jumps,
                     const WienerBundle& wiener, std::span<const double> x0,
                     const TimeGrid& grid)
{
    auto path = build_path_fd(tabulate_drivers(drivers, marks, jumps, grid), jumps, wiener, x0, grid);
    path.drivers = drivers;
    return path;
}

TermBreakdown eval_ito_fd(const PathFD& path, const C2Function& phi, double t)
{
    const std::size_t end = path.grid.index_of(t);
    const std::size_t dim = path.dim;
    const auto& tab = path.coefficients;
    const std::size_t nw = tab.n_wiener;

    TermBreakdown out;
    out.t = path.grid[end];
    out.initial = phi.value(path.at(0));
    out.lhs = phi.value(path.at(end));

    std::vector<double> y(dim), grad(dim), cols, shifted(dim);
    for (std::size_t k = 0; k < end; ++k) {
        const auto xk = path.at(k);
        const auto xm = path.before(k + 1);
        const double dt = path.grid.step(k);
        const auto f = tab.drift_at(k);
        const auto h = tab.compensator_at(k);

        if (!detail::all_zero(f)) {
            out[FdTerm::drift] += dt * detail::segment_integral([&](double theta) {
                detail::lerp(xk, xm, theta, y);
                phi.gradient(y, grad);
                return dot(grad, f);
            });
        }
        if (nw > 0 && !detail::all_zero(tab.diffusion_at(k))) {
            columns(tab.diffusion_at(k), dim, nw, cols);
            out[FdTerm::diffusion_qv] += dt * detail::segment_integral([&](double theta) {
                detail::lerp(xk, xm, theta, y);
                double s = 0.0;
                for (std::size_t r = 0; r < nw; ++r) {
                    const std::span<const double> gr(cols.data() + r * dim, dim);
                    s += phi.hessian_contract(y, gr, gr);
                }
                return 0.5 * s;
            });
            phi.gradient(xk, grad);
            const auto dw = path.wiener.step(k);
            for (std::size_t r = 0; r < nw; ++r) {
                out[FdTerm::wiener_integral] += dot(grad, {cols.data() + r * dim, dim}) * dw[r];
            }
        }
        if (!detail::all_zero(h)) {
            out[FdTerm::compensated_jump] -= dt * detail::segment_integral([&](double theta) {
                detail::lerp(xk, xm, theta, y);
                phi.gradient(y, grad);
                return dot(grad, h);
            });
        }
        if (const auto a = path.grid.event_at(k + 1)) {
            const auto hb = tab.raw_jump_at(*a);
            const auto hh = tab.jump_at(*a);
            const double base = phi.value(xm);
            for (std::size_t i = 0; i < dim; ++i) shifted[i] = xm[i] + hb[i];
            out[FdTerm::raw_jump] += phi.value(shifted) - base;
            phi.gradient(xm, grad);
            const double first = dot(grad, hh);
            for (std::size_t i = 0; i < dim; ++i) shifted[i] = xm[i] + hh[i];
            out[FdTerm::compensated_jump] += first;
            out[FdTerm::remainder_jump] += phi.value(shifted) - base - first;
        }
    }
    out.residual = out.lhs - out.initial - out.sum();
    return out;
}

TermBreakdown eval_ito_fd(const PathFD& path, double p, double t)
{
    if (!(p >= 2.0)) throw DomainError("eval_ito_fd: p must be >= 2");
    const std::size_t end = path.grid.index_of(t);
    const std::size_t dim = path.dim;
    const auto& tab = path.coefficients;
    const std::size_t nw = tab.n_wiener;

    const auto power = [p](std::span<const double> x) { return guarded_pow(norm(x), p); };
    // p |x|^{p-2}
    const auto slope = [p](std::span<const double> x) { return p * guarded_pow(norm(x), p - 2.0); };

    TermBreakdown out;
    out.t = path.grid[end];
    out.initial = power(path.at(0));
    out.lhs = power(path.at(end));

    std::vector<double> y(dim), cols, shifted(dim), breaks;
    const bool smooth = detail::even_power(p);
    for (std::size_t k = 0; k < end; ++k) {
        const auto xk = path.at(k);
        const auto xm = path.before(k + 1);
        if (!smooth) detail::sign_changes(xk, xm, breaks);
        const double dt = path.grid.step(k);
        const auto f = tab.drift_at(k);
        const auto h = tab.compensator_at(k);

        if (!detail::all_zero(f)) {
            out[FdTerm::drift] += dt * detail::segment_integral([&](double theta) {
                detail::lerp(xk, xm, theta, y);
                return slope(y) * dot(y, f);
            }, breaks);
        }
        if (nw > 0 && !detail::all_zero(tab.diffusion_at(k))) {
            columns(tab.diffusion_at(k), dim, nw, cols);
            out[FdTerm::diffusion_qv] += dt * detail::segment_integral([&](double theta) {
                detail::lerp(xk, xm, theta, y);
                const double r = norm(y);
                double cross = 0.0;
                double trace = 0.0;
                for (std::size_t c = 0; c < nw; ++c) {
                    const std::span<const double> gr(cols.data() + c * dim, dim);
                    const double xg = dot(y, gr);
                    cross += xg * xg;
                    trace += dot(gr, gr);
                }
                const double cross_coef = p == 2.0 ? 0.0 : (p - 2.0) * guarded_pow(r, p - 4.0);
                return 0.5 * p * (cross_coef * cross + guarded_pow(r, p - 2.0) * trace);
            }, breaks);
            const double c = slope(xk);
            const auto dw = path.wiener.step(k);
            for (std::size_t r = 0; r < nw; ++r) {
                out[FdTerm::wiener_integral] += c * dot(xk, {cols.data() + r * dim, dim}) * dw[r];
            }
        }
        if (!detail::all_zero(h)) {
            out[FdTerm::compensated_jump] -= dt * detail::segment_integral([&](double theta) {
                detail::lerp(xk, xm, theta, y);
                return slope(y) * dot(y, h);
            }, breaks);
        }
        if (const auto a = path.grid.event_at(k + 1)) {
            const auto hb = tab.raw_jump_at(*a);
            const auto hh = tab.jump_at(*a);
            const double base = power(xm);
            for (std::size_t i = 0; i < dim; ++i) shifted[i] = xm[i] + hb[i];
            out[FdTerm::raw_jump] += power(shifted) - base;
            const double first = slope(xm) * dot(xm, hh);
            for (std::size_t i = 0; i < dim; ++i) shifted[i] = xm[i] + hh[i];
            out[FdTerm::compensated_jump] += first;
            out[FdTerm::remainder_jump] += power(shifted) - base - first;
        }
    }
    out.residual = out.lhs - out.initial - out.sum();
    return out;
}

PathFD simulate_path_fd(const FdModel& model, std::uint64_t seed, std::uint64_t path_index)
{
    auto jump_rng = make_engine(seed, path_index, Stream::jumps);
    auto jumps = sample_jump_stream(model.marks, model.grid, jump_rng);
    const auto grid = merge_jump_times(model.grid, jumps);
    auto wiener_rng = make_engine(seed, path_index, Stream::wiener);
    const auto wiener = sample_wiener(grid, model.drivers.n_wiener, wiener_rng);
    std::vector<double> x0 = model.x0;
    if (x0.empty()) x0.assign(model.drivers.dim, 0.0);
    return build_path_fd(model.drivers, model.marks, jumps, wiener, x0, grid);
}

bool StatResult::within(double sigmas) const noexcept
{
    return std::abs(mean) <= sigmas * std_err;
}

double energy_gap(const PathFD& path)
{
    const std::size_t end = path.grid.size() - 1;
    const auto& tab = path.coefficients;
    const std::size_t dim = path.dim;
    double gap = dot(path.at(end), path.at(end)) - dot(path.at(0), path.at(0));
    std::vector<double> shifted(dim);
    for (std::size_t k = 0; k < end; ++k) {
        const auto xk = path.at(k);
        const auto xm = path.before(k + 1);
        const auto f = tab.drift_at(k);
        const auto g = tab.diffusion_at(k);
        double drift = 0.0;
        for (std::size_t i = 0; i < dim; ++i) drift += (xk[i] + xm[i]) * f[i];  // exact along the segment
        gap -= path.grid.step(k) * (drift + dot(g, g) + tab.jump_square[k]);
        if (const auto a = path.grid.event_at(k + 1)) {
            const auto hb = tab.raw_jump_at(*a);
            for (std::size_t i = 0; i < dim; ++i) shifted[i] = xm[i] + hb[i];
            gap -= dot(shifted, shifted) - dot(xm, xm);
        }
    }
    return gap;
}

StatResult energy_identity_stat(const FdModel& model, std::size_t paths, std::uint64_t seed,
                                std::size_t workers)
{
    std::vector<double> gaps(paths);
    parallel_for(paths, workers, [&](std::size_t i) {
        gaps[i] = energy_gap(simulate_path_fd(model, seed, i));
    });
    StatResult out;
    out.paths = paths;
    if (paths == 0) return out;
    const double n = static_cast<double>(paths);
    out.mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / n;
    if (paths > 1) {
        double ss = 0.0;
        for (double g : gaps) ss += (g - out.mean) * (g - out.mean);
        out.std_err = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

DriverFD clip_jumps(const DriverFD& drivers, double level)
{
    if (!(level > 0.0)) throw ConfigError("clip level must be positive");
    DriverFD out = drivers;
    if (!drivers.compensated) return out;
    out.compensated = [inner = drivers.compensated, level](double t, const Mark& z,
                                                           std::span<double> h) {
        inner(t, z, h);
        for (double& v : h) v = std::clamp(v, -level, level);
    };
    return out;
}

double median(std::vector<double> values)
{
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

std::vector<RefinementLevel> refinement_study(const FdModel& model, double p,
                                              std::span<const std::size_t> levels,
                                              std::size_t paths, std::uint64_t seed,
                                              std::size_t workers)
{
    if (levels.empty()) return {};
    const std::size_t finest = *std::max_element(levels.begin(), levels.end());
    for (std::size_t n : levels) {
        if (n == 0 || finest % n != 0) throw ConfigError("refinement levels must divide the finest level");
    }
    const double horizon = model.grid.horizon();
    std::vector<double> x0 = model.x0;
    if (x0.empty()) x0.assign(model.drivers.dim, 0.0);

    std::vector<std::vector<double>> per_path(paths, std::vector<double>(levels.size()));
    parallel_for(paths, workers, [&](std::size_t i) {
        auto jump_rng = make_engine(seed, i, Stream::jumps);
        const auto jumps = sample_jump_stream(model.marks, TimeGrid::uniform(horizon, finest), jump_rng);
        const auto fine = merge_jump_times(TimeGrid::uniform(horizon, finest), jumps);
        auto wiener_rng = make_engine(seed, i, Stream::wiener);
        const auto fine_w = sample_wiener(fine, model.drivers.n_wiener, wiener_rng);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto coarse = merge_jump_times(TimeGrid::uniform(horizon, levels[l]), jumps);
            const auto w = coarsen_wiener(fine_w, fine, coarse);
            const auto path = build_path_fd(model.drivers, model.marks, jumps, w, x0, coarse);
            per_path[i][l] = std::abs(eval_ito_fd(path, p, horizon).residual);
        }
    });

    std::vector<RefinementLevel> out(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
        out[l].n_steps = levels[l];
        out[l].residuals.resize(paths);
        for (std::size_t i = 0; i < paths; ++i) out[l].residuals[i] = per_path[i][l];
        out[l].median = median(out[l].residuals);
    }
    return out;
}

}  // namespace itolp
