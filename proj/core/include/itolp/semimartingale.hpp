#pragma once

#include "itolp/calculus.hpp"
#include "itolp/jumps.hpp"
#include "itolp/marks.hpp"
#include "itolp/time_grid.hpp"
#include "itolp/wiener.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace itolp {

using TimeVectorFn = std::function<void(double t, std::span<double> out)>;
using MarkVectorFn = std::function<void(double t, const Mark& z, std::span<double> out)>;

/// Drivers of the R^M semimartingale
///   X_t = X_0 + int f ds + int g^r dw^r + int int h-bar pi(dz,ds) + int int h pi~(dz,ds).
/// An empty closure stands for the zero driver. `diffusion` writes an M x R_w
/// matrix row-major (out[i * R_w + r] = g^{ir}).
struct DriverFD {
    std::size_t dim = 1;
    std::size_t n_wiener = 0;
    TimeVectorFn drift;
    TimeVectorFn diffusion;
    MarkVectorFn compensated;
    MarkVectorFn raw;
};

/// Driver values frozen on an augmented grid. Steps use left-endpoint values;
/// atom values are taken at the atom's (time, mark).
struct CoefficientTable {
    std::size_t dim = 1;
    std::size_t n_wiener = 0;
    std::vector<double> drift;         // [step][i]
    std::vector<double> diffusion;     // [step][i][r]
    std::vector<double> compensator;   // [step][i]   int_Z h(t_k, z) mu(dz)
    std::vector<double> jump_square;   // [step]      int_Z |h(t_k, z)|^2 mu(dz)
    std::vector<double> jump;          // [atom][i]   h(tau, z)
    std::vector<double> raw_jump;      // [atom][i]   h-bar(tau, z)

    std::span<const double> drift_at(std::size_t k) const { return {drift.data() + k * dim, dim}; }
    std::span<const double> diffusion_at(std::size_t k) const
    {
        return {diffusion.data() + k * dim * n_wiener, dim * n_wiener};
    }
    std::span<const double> compensator_at(std::size_t k) const
    {
        return {compensator.data() + k * dim, dim};
    }
    std::span<const double> jump_at(std::size_t a) const { return {jump.data() + a * dim, dim}; }
    std::span<const double> raw_jump_at(std::size_t a) const
    {
        return {raw_jump.data() + a * dim, dim};
    }
};

/// Evaluates the drivers on `grid` (which must already contain the atom times).
/// Throws PreconditionError naming (t, z) when h-bar^i h^j != 0 somewhere on
/// (grid times x atom marks) or at an atom.
CoefficientTable tabulate_drivers(const DriverFD& drivers, const MarkSpace& marks,
                                  const JumpStream& jumps, const TimeGrid& grid);

/// Sampled path on a jump-augmented grid. `values` holds X at each point,
/// `left_limits` the state before the jump at that point (equal to `values`
/// away from atoms).
struct PathFD {
    TimeGrid grid = TimeGrid::uniform(1.0, 1);
    std::size_t dim = 1;
    std::vector<double> values;
    std::vector<double> left_limits;
    JumpStream jumps;
    WienerBundle wiener;
    CoefficientTable coefficients;
    DriverFD drivers;

    std::span<const double> at(std::size_t k) const { return {values.data() + k * dim, dim}; }
    std::span<const double> before(std::size_t k) const
    {
        return {left_limits.data() + k * dim, dim};
    }
    std::span<const double> x0() const { return at(0); }
};

/// Euler-Maruyama between atoms, then the jump h-bar + h at each atom:
///   X^-_{k+1} = X_k + f_k dt + g_k dw_k - (int_Z h(t_k, .) dmu) dt
///   X_{k+1}   = X^-_{k+1} + h-bar(t_{k+1}, z) + h(t_{k+1}, z)   if t_{k+1} is an atom.
PathFD build_path_fd(const DriverFD& drivers, const MarkSpace& marks, const JumpStream& jumps,
                     const WienerBundle& wiener, std::span<const double> x0,
                     const TimeGrid& grid);

/// Same recursion from an already tabulated coefficient set.
PathFD build_path_fd(CoefficientTable coefficients, const JumpStream& jumps,
                     const WienerBundle& wiener, std::span<const double> x0,
                     const TimeGrid& grid);

enum class FdTerm : std::size_t {
    drift,
    diffusion_qv,
    wiener_integral,
    raw_jump,
    compensated_jump,
    remainder_jump,
};

/// Term-by-term evaluation of
///   phi(X_t) = phi(X_0) + int D phi g dw + int (D phi f + 1/2 D^2 phi g g) ds
///            + int int [phi(X- + h-bar) - phi(X-)] dpi + int int D phi(X-) h dpi~
///            + int int [phi(X- + h) - phi(X-) - D phi(X-) h] dpi.
struct TermBreakdown {
    static constexpr std::array<std::string_view, 6> names{
        "drift_term",          "diffusion_qv_term",     "wiener_integral",
        "raw_jump_term",       "compensated_jump_term", "remainder_jump_term"};

    double t = 0.0;
    double lhs = 0.0;
    double initial = 0.0;
    std::array<double, 6> terms{};
    double residual = 0.0;

    double& operator[](FdTerm term) { return terms[static_cast<std::size_t>(term)]; }
    double operator[](FdTerm term) const { return terms[static_cast<std::size_t>(term)]; }
    double sum() const;
};

/// General C^2 test function. ds-integrals integrate the state factor along
/// the within-step path with the drivers frozen at t_k; jump integrands use
/// the stored left limits. t must be a grid point (DomainError otherwise).
TermBreakdown eval_ito_fd(const PathFD& path, const C2Function& phi, double t);

/// phi = |.|^p through the closed-form p-power integrands.
TermBreakdown eval_ito_fd(const PathFD& path, double p, double t);

/// Everything needed to simulate one path.
struct FdModel {
    DriverFD drivers;
    MarkSpace marks = MarkSpace::finite_uniform(1, 0.0);
    TimeGrid grid = TimeGrid::uniform(1.0, 1);  // base uniform grid
    std::vector<double> x0;
};

/// Path `path_index` of the model: jumps from Stream::jumps, Wiener increments
/// from Stream::wiener, both seeded by (seed, path_index).
PathFD simulate_path_fd(const FdModel& model, std::uint64_t seed, std::uint64_t path_index);

struct StatResult {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t paths = 0;
    bool within(double sigmas) const noexcept;
};

/// Pathwise p = 2 energy gap
///   |X_T|^2 - |X_0|^2 - int (2 X.f + |g|^2) ds - int int |h|^2 dmu ds
///   - sum_atoms (|X- + h-bar|^2 - |X-|^2),
/// whose expectation vanishes.
double energy_gap(const PathFD& path);

StatResult energy_identity_stat(const FdModel& model, std::size_t paths, std::uint64_t seed,
                                std::size_t workers = 1);

/// h clipped componentwise to [-level, level].
DriverFD clip_jumps(const DriverFD& drivers, double level);

struct RefinementLevel {
    std::size_t n_steps = 0;
    std::vector<double> residuals;  // |residual| per path
    double median = 0.0;
};

/// Coupled grid-refinement study of the p-power identity at t = T. The finest
/// level carries the sampled Wiener increments; coarser levels sum them.
/// `levels` lists base step counts, each dividing the largest.
std::vector<RefinementLevel> refinement_study(const FdModel& model, double p,
                                              std::span<const std::size_t> levels,
                                              std::size_t paths, std::uint64_t seed,
                                              std::size_t workers = 1);

double median(std::vector<double> values);

}  // namespace itolp
