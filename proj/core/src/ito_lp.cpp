#include "itolp/ito_lp.hpp"

#include "itolp/calculus.hpp"
#include "itolp/detail/segment.hpp"
#include "itolp/errors.hpp"
#include "itolp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace itolp {

namespace {

struct PowerTerms {
    double p;
    double value(std::span<const double> x) const { return guarded_pow(norm(x), p); }
    // p |x|^{p-2}
    double slope(std::span<const double> x) const { return p * guarded_pow(norm(x), p - 2.0); }
    // p/2 ((p-2) |x|^{p-4} sum_r (x.g^r)^2, |x|^{p-2} |g|^2)
    std::pair<double, double> qv(std::span<const double> x, std::span<const double> g,
                                 std::size_t nw) const
    {
        const std::size_t dim = x.size();
        double cross = 0.0;
        for (std::size_t r = 0; r < nw; ++r) {
            double xg = 0.0;
            for (std::size_t i = 0; i < dim; ++i) xg += x[i] * g[i * nw + r];
            cross += xg * xg;
        }
        const double rx = norm(x);
        const double cross_coef = p == 2.0 ? 0.0 : (p - 2.0) * guarded_pow(rx, p - 4.0);
        return {0.5 * p * cross_coef * cross, 0.5 * p * guarded_pow(rx, p - 2.0) * dot(g, g)};
    }
};

LpTermBreakdown evaluate(const FieldPath& path, double p, double t, LpForm form)
{
    if (!(p >= 2.0)) throw DomainError("eval_ito_lp: p must be >= 2");
    if (form == LpForm::divergence && path.mode != LpMode::thm22) {
        throw ConfigError("eval_ito_lp: thm22 evaluation needs a path built in thm22 mode");
    }
    if (form == LpForm::simple && path.dim != 1) {
        throw ConfigError("eval_ito_lp: the combined quadratic-variation form needs M = 1");
    }
    const std::size_t end = path.grid.index_of(t);
    const SpaceGrid& g = path.space;
    const std::size_t cells = g.size();
    const std::size_t dim = path.dim;
    const std::size_t nw = path.n_wiener;
    const std::size_t slice = path.slice();
    const double vol = g.cell_volume();
    const PowerTerms pw{p};

    LpTermBreakdown out;
    out.form = form;
    out.p = p;
    out.t = path.grid[end];
    out.init = lp_norm_pow(path.at(0), p);
    out.lhs = lp_norm_pow(path.at(end), p);

    std::vector<double> y(slice), shifted(dim);
    std::vector<Field> du_k, du_m;
    std::vector<double> dy(cells), breaks;
    const bool smooth = detail::even_power(p);
    for (std::size_t k = 0; k < end; ++k) {
        const auto xk = path.at(k).values;
        const auto xm = path.before(k + 1).values;
        if (!smooth) detail::sign_changes(xk, xm, breaks);
        const double dt = path.grid.step(k);
        const auto f = (form == LpForm::divergence ? path.drift0_at(k) : path.drift_at(k)).values;
        const auto h = path.compensator_at(k).values;
        const auto along = [&](double theta) { detail::lerp(xk, xm, theta, y); };
        const auto cell = [&](std::size_t c) { return std::span<const double>(y.data() + c * dim, dim); };

        if (!detail::all_zero(f)) {
            out[LpTerm::drift] += dt * detail::segment_integral([&](double theta, double& mag) {
                along(theta);
                double s = 0.0;
                for (std::size_t c = 0; c < cells; ++c) {
                    const auto yc = cell(c);
                    const double v = pw.slope(yc) * dot(yc, f.subspan(c * dim, dim));
                    s += v;
                    mag += std::abs(v) * vol;
                }
                return s * vol;
            }, breaks);
        }
        if (form == LpForm::divergence) {
            bool any = false;
            for (std::size_t a = 0; a < g.dim(); ++a) any = any || !detail::all_zero(path.flux_at(k, a).values);
            if (any) {
                du_k.clear();
                du_m.clear();
                for (std::size_t a = 0; a < g.dim(); ++a) {
                    du_k.push_back(fd_derivative(path.at(k), a));
                    du_m.push_back(fd_derivative(path.before(k + 1), a));
                }
                out[LpTerm::by_parts] += dt * detail::segment_integral([&](double theta, double& mag) {
                    along(theta);
                    double s = 0.0;
                    for (std::size_t c = 0; c < cells; ++c) {
                        double fdu = 0.0;
                        for (std::size_t a = 0; a < g.dim(); ++a) {
                            const double dk = du_k[a].values()[c];
                            const double d = dk + theta * (du_m[a].values()[c] - dk);
                            fdu += path.flux_at(k, a).values[c] * d;
                        }
                        const double v = guarded_pow(std::abs(y[c]), p - 2.0) * fdu;
                        s += v;
                        mag += p * (p - 1.0) * std::abs(v) * vol;
                    }
                    return -p * (p - 1.0) * s * vol;
                }, breaks);
            }
        }
        if (nw > 0) {
            const auto gk = path.diffusion_at(k).values;
            if (!detail::all_zero(gk)) {
                const std::size_t gs = dim * nw;
                if (form == LpForm::simple) {
                    out[LpTerm::qv_combined] += dt * detail::segment_integral([&](double theta) {
                        along(theta);
                        double s = 0.0;
                        for (std::size_t c = 0; c < cells; ++c) {
                            const auto gc = gk.subspan(c * gs, gs);
                            s += guarded_pow(std::abs(y[c]), p - 2.0) * dot(gc, gc);
                        }
                        return 0.5 * p * (p - 1.0) * s * vol;
                    }, breaks);
                } else {
                    out[LpTerm::qv_cross] += dt * detail::segment_integral([&](double theta, double& mag) {
                        along(theta);
                        double s = 0.0;
                        for (std::size_t c = 0; c < cells; ++c) {
                            const double v = pw.qv(cell(c), gk.subspan(c * gs, gs), nw).first;
                            s += v;
                            mag += std::abs(v) * vol;
                        }
                        return s * vol;
                    }, breaks);
                    out[LpTerm::qv_trace] += dt * detail::segment_integral([&](double theta, double& mag) {
                        along(theta);
                        double s = 0.0;
                        for (std::size_t c = 0; c < cells; ++c) {
                            const double v = pw.qv(cell(c), gk.subspan(c * gs, gs), nw).second;
                            s += v;
                            mag += std::abs(v) * vol;
                        }
                        return s * vol;
                    }, breaks);
                }
                const auto dw = path.wiener.step(k);
                double s = 0.0;
                for (std::size_t c = 0; c < cells; ++c) {
                    const auto xc = xk.subspan(c * dim, dim);
                    const double sl = pw.slope(xc);
                    if (sl == 0.0) continue;
                    double acc = 0.0;
                    for (std::size_t r = 0; r < nw; ++r) {
                        double xg = 0.0;
                        for (std::size_t i = 0; i < dim; ++i) xg += xc[i] * gk[c * gs + i * nw + r];
                        acc += xg * dw[r];
                    }
                    s += sl * acc;
                }
                out[LpTerm::wiener] += s * vol;
            }
        }
        if (!detail::all_zero(h)) {
            out[LpTerm::compensated_jump] -= dt * detail::segment_integral([&](double theta, double& mag) {
                along(theta);
                double s = 0.0;
                for (std::size_t c = 0; c < cells; ++c) {
                    const auto yc = cell(c);
                    const double v = pw.slope(yc) * dot(yc, h.subspan(c * dim, dim));
                    s += v;
                    mag += std::abs(v) * vol;
                }
                return s * vol;
            }, breaks);
        }
        if (const auto a = path.grid.event_at(k + 1)) {
            const auto hh = path.jump_at(*a).values;
            double first = 0.0;
            double rem = 0.0;
            for (std::size_t c = 0; c < cells; ++c) {
                const auto xc = xm.subspan(c * dim, dim);
                const auto hc = hh.subspan(c * dim, dim);
                const double fc = pw.slope(xc) * dot(xc, hc);
                for (std::size_t i = 0; i < dim; ++i) shifted[i] = xc[i] + hc[i];
                first += fc;
                rem += pw.value(shifted) - pw.value(xc) - fc;
            }
            out[LpTerm::compensated_jump] += first * vol;
            out[LpTerm::remainder_jump] += rem * vol;
        }
    }
    out.residual = out.lhs - out.init - out.sum();
    return out;
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<LpTerm> LpTermBreakdown::active() const
{
    switch (form) {
    case LpForm::general:
        return {LpTerm::wiener, LpTerm::drift, LpTerm::qv_cross, LpTerm::qv_trace,
                LpTerm::compensated_jump, LpTerm::remainder_jump};
    case LpForm::divergence:
        return {LpTerm::wiener,   LpTerm::drift,            LpTerm::by_parts,      LpTerm::qv_cross,
                LpTerm::qv_trace, LpTerm::compensated_jump, LpTerm::remainder_jump};
    case LpForm::simple:
        return {LpTerm::wiener, LpTerm::drift, LpTerm::qv_combined, LpTerm::compensated_jump,
                LpTerm::remainder_jump};
    }
    return {};
}

double LpTermBreakdown::sum() const
{
    double s = 0.0;
    for (const auto term : active()) s += (*this)[term];
    return s;
}

LpTermBreakdown eval_ito_lp(const FieldPath& path, double p, double t, LpMode mode)
{
    return evaluate(path, p, t, mode == LpMode::thm22 ? LpForm::divergence : LpForm::general);
}

LpTermBreakdown eval_ito_lp_simple(const FieldPath& path, double p, double t)
{
    return evaluate(path, p, t, LpForm::simple);
}

bool DualRouteResult::agrees(double rel_tol) const noexcept
{
    return difference <= rel_tol * (1.0 + std::abs(field.lhs));
}

DualRouteResult ito_lp_mollified_consistency(const FieldPath& path, const MollKernel& kernel, double p,
                                             double t)
{
    const FieldPath smooth = mollify_pathwise(path, kernel);
    DualRouteResult out;
    out.field = eval_ito_lp(smooth, p, t, LpMode::thm21);
    const double vol = smooth.space.cell_volume();
    for (std::size_t c = 0; c < smooth.space.size(); ++c) {
        const auto b = eval_ito_fd(restrict_to_cell(smooth, c), p, t);
        out.pointwise_lhs += b.lhs * vol;
        out.pointwise_residual += b.residual * vol;
    }
    out.difference = std::abs(out.field.residual - out.pointwise_residual);
    return out;
}

double ByPartsResult::gap() const noexcept
{
    return std::abs(lhs - rhs);
}

ByPartsResult by_parts_check(FieldView u, const std::vector<Field>& flux, double p)
{
    if (!(p >= 2.0)) throw DomainError("by_parts_check: p must be >= 2");
    if (u.components != 1) throw ConfigError("by_parts_check: u must be scalar (M = 1)");
    const SpaceGrid& g = *u.grid;
    if (flux.size() != g.dim()) throw ConfigError("by_parts_check: need one flux field per axis");
    std::vector<Field> du, df;
    for (std::size_t a = 0; a < g.dim(); ++a) {
        if (!(flux[a].grid() == g) || flux[a].components() != 1) {
            throw ConfigError("by_parts_check: flux fields must be scalar on the same grid");
        }
        du.push_back(fd_derivative(u, a));
        df.push_back(fd_derivative(flux[a], a));
    }
    ByPartsResult out;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double uc = u.values[c];
        const double w = guarded_pow(std::abs(uc), p - 2.0);
        double div = 0.0;
        double fdu = 0.0;
        double mag = 0.0;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            div += df[a].values()[c];
            fdu += flux[a].values()[c] * du[a].values()[c];
            mag += std::abs(uc * df[a].values()[c]) + (p - 1.0) * std::abs(flux[a].values()[c] * du[a].values()[c]);
        }
        out.lhs += w * uc * div;
        out.rhs -= (p - 1.0) * w * fdu;
        out.scale += w * mag;
    }
    const double vol = g.cell_volume();
    out.lhs *= vol;
    out.rhs *= vol;
    out.scale *= vol;
    return out;
}

ByPartsResult by_parts_check(const FieldPath& path, double p, double t)
{
    if (path.mode != LpMode::thm22) throw ConfigError("by_parts_check: path was not built in thm22 mode");
    const std::size_t k = path.grid.index_of(t);
    if (k >= path.grid.n_steps()) throw DomainError("by_parts_check: t must be before the horizon");
    std::vector<Field> flux;
    for (std::size_t a = 0; a < path.space.dim(); ++a) {
        const auto v = path.flux_at(k, a).values;
        flux.emplace_back(path.space, 1, std::vector<double>(v.begin(), v.end()));
    }
    return by_parts_check(path.at(k), flux, p);
}

AprioriReport apriori_estimate_report(const FieldModel& model, double p, std::size_t paths,
                                      std::uint64_t seed, std::size_t workers)
{
    if (!(p >= 2.0)) throw DomainError("apriori_estimate_report: p must be >= 2");
    if (model.mode != LpMode::thm22) throw ConfigError("apriori_estimate_report: needs a thm22 model");
    static const std::array<const char*, 5> keys{"psi", "f0", "h_lp", "g_f_du", "h_l2"};
    const double horizon = model.grid.horizon();
    const double w_f0 = std::pow(horizon, p - 1.0);
    const double w_mid = std::pow(horizon, (p - 2.0) / 2.0);

    std::vector<double> sup(paths);
    std::vector<std::array<double, 5>> comp(paths);
    parallel_for(paths, workers, [&](std::size_t i) {
        const FieldPath fp = simulate_field_path(model, seed, i);
        const SpaceGrid& g = fp.space;
        const double vol = g.cell_volume();
        double s = 0.0;
        for (std::size_t k = 0; k < fp.grid.size(); ++k) {
            s = std::max({s, lp_norm_pow(fp.at(k), p), lp_norm_pow(fp.before(k), p)});
        }
        sup[i] = s;
        auto& c = comp[i];
        c = {};
        c[0] = 2.0 * lp_norm_pow(fp.at(0), p);
        std::vector<double> x(g.dim()), v(fp.dim);
        const auto nodes = fp.marks.nodes();
        const auto weights = fp.marks.weights();
        for (std::size_t k = 0; k < fp.grid.n_steps(); ++k) {
            const double dt = fp.grid.step(k);
            c[1] += dt * lp_norm_pow(fp.drift0_at(k), p);
            if (fp.drivers.jump) {
                double hp = 0.0;
                for (std::size_t cell = 0; cell < g.size(); ++cell) {
                    g.center(cell, x);
                    for (std::size_t j = 0; j < nodes.size(); ++j) {
                        fp.drivers.jump(fp.grid[k], x, nodes[j], v);
                        hp += weights[j] * guarded_pow(norm(v), p);
                    }
                }
                c[2] += dt * hp * vol;
            }
            double mid = 0.0;
            if (fp.n_wiener > 0) mid += lp_norm_pow(fp.diffusion_at(k), p);
            Field grad(g, g.dim());
            for (std::size_t a = 0; a < g.dim(); ++a) {
                mid += lp_norm_pow(fp.flux_at(k, a), p);
                const Field da = fd_derivative(fp.at(k), a);
                for (std::size_t cell = 0; cell < g.size(); ++cell) grad.at(cell)[a] = da.values()[cell];
            }
            mid += lp_norm_pow(grad, p);
            c[3] += dt * mid;
            double l2 = 0.0;
            for (std::size_t cell = 0; cell < g.size(); ++cell) {
                l2 += std::pow(fp.jump_square[k * g.size() + cell], p / 2.0);
            }
            c[4] += dt * l2 * vol;
        }
        c[1] *= w_f0;
        c[3] *= w_mid;
        c[4] *= w_mid;
    });

    AprioriReport out;
    out.p = p;
    out.paths = paths;
    out.lhs = mean(sup);
    for (std::size_t j = 0; j < keys.size(); ++j) {
        std::vector<double> col(paths);
        for (std::size_t i = 0; i < paths; ++i) col[i] = comp[i][j];
        out.components[keys[j]] = mean(col);
        if (j > 0) out.remainder += out.components[keys[j]];
    }
    const double excess = std::max(out.lhs - out.components["psi"], 0.0);
    if (excess == 0.0) {
        out.ratio = 0.0;
    } else {
        out.ratio = out.remainder > 0.0 ? excess / out.remainder : std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace itolp
