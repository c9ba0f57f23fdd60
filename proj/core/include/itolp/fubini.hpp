#pragma once

#include "itolp/jumps.hpp"
#include "itolp/marks.hpp"
#include "itolp/time_grid.hpp"

#include <functional>
#include <vector>

namespace itolp {

/// Finite parameter measure m = sum_j weights[j] delta_{points[j]}.
struct ParamMeasure {
    std::vector<double> points;
    std::vector<double> weights;

    /// ConfigError on size mismatch, negative or non-finite weights.
    void validate() const;
    double total_mass() const;
};

using ParamFunction = std::function<double(double t, const Mark& z, double lambda)>;

struct FubiniCheck {
    double lhs = 0.0;        // int_Lambda (stochastic integral of F(., ., lambda)) m(d lambda)
    double rhs = 0.0;        // stochastic integral of int_Lambda F m(d lambda)
    double condition = 0.0;  // integrability condition value on (0, T]
    bool holds(double rel_tol) const noexcept;
};

/// Compensated integrals over [0, t] on one sampled stream; `condition` is fubini_cond_value.
FubiniCheck fubini_tilde_check(const ParamFunction& ffun, const ParamMeasure& pm, const JumpStream& jumps,
                               const MarkSpace& marks, const TimeGrid& grid, double t);

/// Raw pi-integrals over [0, t]; `condition` is pi_cond_value.
FubiniCheck fubini_pi_check(const ParamFunction& gfun, const ParamMeasure& pm, const JumpStream& jumps,
                            const MarkSpace& marks, const TimeGrid& grid, double t);

/// int_Lambda ( int_0^T int_Z |f|^2 dmu dt )^{1/2} m(d lambda)
double fubini_cond_value(const ParamFunction& ffun, const ParamMeasure& pm, const MarkSpace& marks,
                         const TimeGrid& grid);
/// int_Lambda int_0^T int_Z |f|^2 dmu dt m(d lambda)
double protter_cond_value(const ParamFunction& ffun, const ParamMeasure& pm, const MarkSpace& marks,
                          const TimeGrid& grid);
/// int_Lambda int_0^T int_Z |g| dmu dt m(d lambda)
double pi_cond_value(const ParamFunction& gfun, const ParamMeasure& pm, const MarkSpace& marks,
                     const TimeGrid& grid);

}  // namespace itolp
