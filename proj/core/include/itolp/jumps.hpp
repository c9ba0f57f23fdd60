#pragma once

#include "itolp/marks.hpp"
#include "itolp/rng.hpp"
#include "itolp/time_grid.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace itolp {

/// One atom of the Poisson random measure pi(dz, dt).
struct Atom {
    double time = 0.0;
    Mark mark;
};

/// Sampled atoms of pi on (0, T] x Z, sorted by strictly increasing time.
struct JumpStream {
    std::vector<Atom> atoms;
    int truncation_level = 0;

    std::size_t size() const noexcept { return atoms.size(); }
    bool empty() const noexcept { return atoms.empty(); }
    std::vector<double> times() const;
};

/// N ~ Poisson(lambda T), times i.i.d. uniform on (0, T], marks i.i.d. from the mark law.
/// Throws ConfigError when lambda or T is not finite.
JumpStream sample_jump_stream(const MarkSpace& marks, const TimeGrid& grid, Engine& rng);

/// Nested streams for the truncation ladder lambda_1 < lambda_2 < ... :
/// the top level is sampled once and lower levels are obtained by thinning,
/// so level n's atoms are a subset of level n+1's and each level is
/// Poisson with intensity lambda_n * law.
std::vector<JumpStream> sample_jump_ladder(const MarkSpace& marks,
                                           std::span<const double> masses,
                                           const TimeGrid& grid, Engine& rng);

/// Grid with the stream's atom times inserted as points.
TimeGrid merge_jump_times(const TimeGrid& grid, const JumpStream& jumps);

/// Throws PreconditionError unless `grid` was augmented with exactly these atoms.
void require_augmented(const JumpStream& jumps, const TimeGrid& grid);

/// Scalar integrand h(t, z) of the jump integrals.
using MarkFunction = std::function<double(double t, const Mark& z)>;

/// Left-endpoint rule in time on `grid`, mark-space cubature in z:
///   sum_k (t_{k+1} - t_k) * int_Z hfun(t_k, z) mu(dz) over [0, t]
/// (the last step is truncated when t is not a grid point).
double compensator_integral(const MarkFunction& hfun, const MarkSpace& marks,
                            const TimeGrid& grid, double t);

/// int_0^t int_Z hfun pi(dz, ds): sum over atoms with time <= t.
double raw_jump_integral(const MarkFunction& hfun, const JumpStream& jumps, double t);

/// int_0^t int_Z hfun pi~(dz, ds) = raw_jump_integral - compensator_integral.
double compensated_jump_integral(const MarkFunction& hfun, const JumpStream& jumps,
                                 const MarkSpace& marks, const TimeGrid& grid, double t);

}  // namespace itolp
