#include "itolp/fubini.hpp"

#include "itolp/errors.hpp"

#include <cmath>

namespace itolp {

namespace {

MarkFunction at_lambda(const ParamFunction& f, double lambda)
{
    return [&f, lambda](double t, const Mark& z) { return f(t, z, lambda); };
}

MarkFunction integrated(const ParamFunction& f, const ParamMeasure& pm)
{
    return [&f, &pm](double t, const Mark& z) {
        double s = 0.0;
        for (std::size_t j = 0; j < pm.points.size(); ++j) s += pm.weights[j] * f(t, z, pm.points[j]);
        return s;
    };
}

}  // namespace

void ParamMeasure::validate() const
{
    if (points.size() != weights.size()) throw ConfigError("parameter measure: points and weights differ in length");
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (!std::isfinite(points[j])) throw ConfigError("parameter measure: non-finite point");
        if (!std::isfinite(weights[j]) || weights[j] < 0.0) {
            throw ConfigError("parameter measure: weights must be finite and nonnegative");
        }
    }
}

double ParamMeasure::total_mass() const
{
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

bool FubiniCheck::holds(double rel_tol) const noexcept
{
    return std::abs(lhs - rhs) <= rel_tol * (1.0 + std::abs(lhs));
}

FubiniCheck fubini_tilde_check(const ParamFunction& ffun, const ParamMeasure& pm, const JumpStream& jumps,
                               const MarkSpace& marks, const TimeGrid& grid, double t)
{
    pm.validate();
    FubiniCheck out;
    for (std::size_t j = 0; j < pm.points.size(); ++j) {
        out.lhs += pm.weights[j] * compensated_jump_integral(at_lambda(ffun, pm.points[j]), jumps, marks, grid, t);
    }
    out.rhs = compensated_jump_integral(integrated(ffun, pm), jumps, marks, grid, t);
    out.condition = fubini_cond_value(ffun, pm, marks, grid);
    return out;
}

FubiniCheck fubini_pi_check(const ParamFunction& gfun, const ParamMeasure& pm, const JumpStream& jumps,
                            const MarkSpace& marks, const TimeGrid& grid, double t)
{
    pm.validate();
    if (!(t >= 0.0 && t <= grid.horizon())) throw DomainError("fubini_pi_check: t outside [0, T]");
    FubiniCheck out;
    for (std::size_t j = 0; j < pm.points.size(); ++j) {
        out.lhs += pm.weights[j] * raw_jump_integral(at_lambda(gfun, pm.points[j]), jumps, t);
    }
    out.rhs = raw_jump_integral(integrated(gfun, pm), jumps, t);
    out.condition = pi_cond_value(gfun, pm, marks, grid);
    return out;
}

double fubini_cond_value(const ParamFunction& ffun, const ParamMeasure& pm, const MarkSpace& marks,
                         const TimeGrid& grid)
{
    pm.validate();
    double s = 0.0;
    for (std::size_t j = 0; j < pm.points.size(); ++j) {
        const double lambda = pm.points[j];
        const double sq = compensator_integral(
            [&](double t, const Mark& z) {
                const double v = ffun(t, z, lambda);
                return v * v;
            },
            marks, grid, grid.horizon());
        s += pm.weights[j] * std::sqrt(sq);
    }
    return s;
}

double protter_cond_value(const ParamFunction& ffun, const ParamMeasure& pm, const MarkSpace& marks,
                          const TimeGrid& grid)
{
    pm.validate();
    double s = 0.0;
    for (std::size_t j = 0; j < pm.points.size(); ++j) {
        const double lambda = pm.points[j];
        s += pm.weights[j] * compensator_integral(
                                 [&](double t, const Mark& z) {
                                     const double v = ffun(t, z, lambda);
                                     return v * v;
                                 },
                                 marks, grid, grid.horizon());
    }
    return s;
}

double pi_cond_value(const ParamFunction& gfun, const ParamMeasure& pm, const MarkSpace& marks,
                     const TimeGrid& grid)
{
    pm.validate();
    double s = 0.0;
    for (std::size_t j = 0; j < pm.points.size(); ++j) {
        const double lambda = pm.points[j];
        s += pm.weights[j] * compensator_integral(
                                 [&](double t, const Mark& z) { return std::abs(gfun(t, z, lambda)); },
                                 marks, grid, grid.horizon());
    }
    return s;
}

}  // namespace itolp
