#include "itolp/mollifier.hpp"

#include "itolp/calculus.hpp"
#include "itolp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace itolp {

namespace {

double bump(double r2)
{
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

void mollify_into(FieldView u, const MollKernel& kernel, double* out)
{
    const SpaceGrid& g = *u.grid;
    const std::size_t comps = u.components;
    const std::size_t d = g.dim();
    const long n = static_cast<long>(g.cells_per_axis());
    for (std::size_t c = 0; c < g.size(); ++c) {
        double* o = out + c * comps;
        for (std::size_t i = 0; i < comps; ++i) o[i] = 0.0;
        for (std::size_t j = 0; j < kernel.size(); ++j) {
            std::size_t src = 0;
            bool inside = true;
            for (std::size_t a = 0; a < d; ++a) {
                const long i = static_cast<long>(g.coordinate(c, a)) - kernel.offset(j, a);
                if (i < 0 || i >= n) {
                    inside = false;
                    break;
                }
                src += static_cast<std::size_t>(i) * g.stride(a);
            }
            if (!inside) continue;
            const double w = kernel.weight(j);
            const auto v = u.at(src);
            for (std::size_t i = 0; i < comps; ++i) o[i] += w * v[i];
        }
    }
}

void mollify_table(std::vector<double>& table, const SpaceGrid& g, std::size_t comps,
                   std::size_t slices, const MollKernel& kernel, const char* what)
{
    const std::size_t slice = g.size() * comps;
    std::vector<double> out(table.size());
    for (std::size_t s = 0; s < slices; ++s) {
        const FieldView u{&g, comps, {table.data() + s * slice, slice}};
        require_margin(u, kernel.radius(), what);
        mollify_into(u, kernel, out.data() + s * slice);
    }
    table = std::move(out);
}

}  // namespace

MollKernel::MollKernel(const SpaceGrid& grid, double eps) : grid_(grid), eps_(eps)
{
    const double h = grid.spacing();
    if (!std::isfinite(eps) || eps < 2.0 * h) {
        throw ConfigError("mollifier: eps must be at least 2 grid spacings");
    }
    radius_ = static_cast<std::size_t>(std::ceil(eps / h));
    const std::size_t d = grid.dim();
    const long r = static_cast<long>(radius_);
    std::vector<long> o(d, -r);
    double total = 0.0;
    for (;;) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double y = static_cast<double>(o[a]) * h / eps;
            r2 += y * y;
        }
        const double w = bump(r2);
        if (w > 0.0) {
            offsets_.insert(offsets_.end(), o.begin(), o.end());
            weights_.push_back(w);
            total += w;
        }
        std::size_t a = 0;
        while (a < d && ++o[a] > r) o[a++] = -r;
        if (a == d) break;
    }
    for (double& w : weights_) w /= total;
}

double MollKernel::lq_norm(double q) const
{
    if (!(q >= 1.0)) throw DomainError("mollifier: lq_norm needs q >= 1");
    const double vol = grid_.cell_volume();
    double s = 0.0;
    for (double w : weights_) s += std::pow(w / vol, q) * vol;
    return std::pow(s, 1.0 / q);
}

Field mollify(FieldView u, const MollKernel& kernel)
{
    if (!(*u.grid == kernel.grid())) throw ConfigError("mollify: kernel built for another grid");
    require_margin(u, kernel.radius(), "mollify: field support reaches the kernel band");
    Field out(*u.grid, u.components);
    mollify_into(u, kernel, out.values().data());
    return out;
}

FieldDrivers mollify_drivers(const FieldDrivers& drivers, const MollKernel& kernel)
{
    auto k = std::make_shared<const MollKernel>(kernel);
    const auto shifted = [k](std::span<const double> x, std::size_t j, std::span<double> y) {
        const double h = k->grid().spacing();
        for (std::size_t a = 0; a < x.size(); ++a) y[a] = x[a] - static_cast<double>(k->offset(j, a)) * h;
    };
    const auto field_fn = [&](const FieldFn& fn) -> FieldFn {
        if (!fn) return fn;
        return [k, fn, shifted](double t, std::span<const double> x, std::span<double> out) {
            std::vector<double> y(x.size()), v(out.size());
            for (double& o : out) o = 0.0;
            for (std::size_t j = 0; j < k->size(); ++j) {
                shifted(x, j, y);
                fn(t, y, v);
                for (std::size_t i = 0; i < out.size(); ++i) out[i] += k->weight(j) * v[i];
            }
        };
    };

    FieldDrivers out = drivers;
    out.drift = field_fn(drivers.drift);
    out.diffusion = field_fn(drivers.diffusion);
    for (std::size_t a = 0; a < drivers.flux.size(); ++a) out.flux[a] = field_fn(drivers.flux[a]);
    if (drivers.jump) {
        out.jump = [k, fn = drivers.jump, shifted](double t, std::span<const double> x, const Mark& z,
                                                  std::span<double> res) {
            std::vector<double> y(x.size()), v(res.size());
            for (double& o : res) o = 0.0;
            for (std::size_t j = 0; j < k->size(); ++j) {
                shifted(x, j, y);
                fn(t, y, z, v);
                for (std::size_t i = 0; i < res.size(); ++i) res[i] += k->weight(j) * v[i];
            }
        };
    }
    if (drivers.initial) {
        out.initial = [k, fn = drivers.initial, shifted](std::span<const double> x, std::span<double> res) {
            std::vector<double> y(x.size()), v(res.size());
            for (double& o : res) o = 0.0;
            for (std::size_t j = 0; j < k->size(); ++j) {
                shifted(x, j, y);
                fn(y, v);
                for (std::size_t i = 0; i < res.size(); ++i) res[i] += k->weight(j) * v[i];
            }
        };
    }
    return out;
}

FieldPath mollify_pathwise(const FieldPath& path, const MollKernel& kernel)
{
    if (!(path.space == kernel.grid())) throw ConfigError("mollify_pathwise: kernel built for another grid");
    FieldPath out = path;
    const SpaceGrid& g = path.space;
    const std::size_t steps = path.grid.n_steps();
    const std::size_t points = path.grid.size();
    mollify_table(out.values, g, path.dim, points, kernel, "mollify_pathwise: u");
    mollify_table(out.left_limits, g, path.dim, points, kernel, "mollify_pathwise: u_-");
    mollify_table(out.drift, g, path.dim, steps, kernel, "mollify_pathwise: drift");
    mollify_table(out.drift0, g, path.dim, steps, kernel, "mollify_pathwise: f^0");
    if (!out.flux.empty()) {
        mollify_table(out.flux, g, 1, steps * g.dim(), kernel, "mollify_pathwise: f^a");
    }
    if (path.n_wiener > 0) {
        mollify_table(out.diffusion, g, path.dim * path.n_wiener, steps, kernel, "mollify_pathwise: g");
    }
    mollify_table(out.compensator, g, path.dim, steps, kernel, "mollify_pathwise: compensator");
    mollify_table(out.jump, g, path.dim, path.jumps.size(), kernel, "mollify_pathwise: h");
    out.drivers = mollify_drivers(path.drivers, kernel);

    std::fill(out.jump_square.begin(), out.jump_square.end(), 0.0);
    if (out.drivers.jump) {
        std::vector<double> x(g.dim()), v(path.dim);
        const auto nodes = path.marks.nodes();
        const auto weights = path.marks.weights();
        for (std::size_t k = 0; k < steps; ++k) {
            for (std::size_t c = 0; c < g.size(); ++c) {
                g.center(c, x);
                double& square = out.jump_square[k * g.size() + c];
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    out.drivers.jump(path.grid[k], x, nodes[j], v);
                    square += weights[j] * dot(v, v);
                }
            }
        }
    }
    return out;
}

}  // namespace itolp
