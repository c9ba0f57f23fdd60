#pragma once

#include "itolp/field_process.hpp"
#include "itolp/mollifier.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace itolp {

enum class LpTerm : std::size_t {
    wiener,
    drift,
    by_parts,
    qv_cross,
    qv_trace,
    qv_combined,
    compensated_jump,
    remainder_jump,
};

/// general: thm21 terms; divergence: thm22 with the by-parts term;
/// simple: M = 1 with the two quadratic-variation terms combined.
enum class LpForm { general, divergence, simple };

/// |u_t|^p_{L_p} = |psi|^p_{L_p} + sum of the active terms + residual, where
///   wiener           p int int |u|^{p-2} u^i g^{ir} dx dw^r
///   drift            p int int |u|^{p-2} u^i f^i dx ds        (f^0 in divergence form)
///   by_parts         -p (p-1) int int |u|^{p-2} f^a D_a u dx ds
///   qv_cross         p/2 (p-2) int int |u|^{p-4} |u^i g^{i.}|^2 dx ds
///   qv_trace         p/2 int int |u|^{p-2} |g|^2 dx ds
///   qv_combined      p/2 (p-1) int int |u|^{p-2} |g|^2 dx ds
///   compensated_jump p int int int |u_-|^{p-2} u_-^i h^i dx dpi~
///   remainder_jump   int int int (|u_- + h|^p - |u_-|^p - p |u_-|^{p-2} u_-.h) dx dpi
struct LpTermBreakdown {
    static constexpr std::array<std::string_view, 8> names{
        "wiener_term",   "drift_term",    "by_parts_term",         "qv_cross_term",
        "qv_trace_term", "qv_combined_term", "compensated_jump_term", "remainder_jump_term"};

    LpForm form = LpForm::general;
    double p = 2.0;
    double t = 0.0;
    double lhs = 0.0;
    double init = 0.0;
    std::array<double, 8> terms{};
    double residual = 0.0;

    double& operator[](LpTerm term) { return terms[static_cast<std::size_t>(term)]; }
    double operator[](LpTerm term) const { return terms[static_cast<std::size_t>(term)]; }
    /// Terms of this form, in report order.
    std::vector<LpTerm> active() const;
    double sum() const;
};

/// dx-integrals by the cell-centre rule; ds-integrals along the within-step
/// path u_k + theta (u^-_{k+1} - u_k) with drivers frozen at t_k; jump
/// integrals from the stored left limits. LpMode::thm22 needs a path built in
/// thm22 mode. t must be a grid point.
LpTermBreakdown eval_ito_lp(const FieldPath& path, double p, double t, LpMode mode);

/// M = 1, thm21 mode, quadratic variation as one term.
LpTermBreakdown eval_ito_lp_simple(const FieldPath& path, double p, double t);

struct DualRouteResult {
    LpTermBreakdown field;       // route A: eval_ito_lp on the mollified path
    double pointwise_lhs = 0.0;  // route B: sum over cells of the R^M identity, times cell volume
    double pointwise_residual = 0.0;
    double difference = 0.0;  // |residual_A - residual_B|
    bool agrees(double rel_tol) const noexcept;
};

DualRouteResult ito_lp_mollified_consistency(const FieldPath& path, const MollKernel& kernel, double p,
                                             double t);

struct ByPartsResult {
    double lhs = 0.0;  // int |u|^{p-2} u D_a f^a dx
    double rhs = 0.0;  // -(p-1) int |u|^{p-2} f^a D_a u dx
    double scale = 0.0;
    double gap() const noexcept;
};

/// Static form: u scalar, one flux field per axis.
ByPartsResult by_parts_check(FieldView u, const std::vector<Field>& flux, double p);
/// At grid point t (t < T) of a thm22 path, with the flux of that step.
ByPartsResult by_parts_check(const FieldPath& path, double p, double t);

struct AprioriReport {
    double p = 2.0;
    double lhs = 0.0;  // E sup_t |u_t|^p
    std::map<std::string, double> components;
    double remainder = 0.0;  // sum of the components except psi
    double ratio = 0.0;      // max(lhs - psi, 0) / remainder, 0/0 := 0
    std::size_t paths = 0;
};

/// Monte Carlo estimate of the terms of the L_p a priori estimate for a
/// thm22 model; paths 0..paths-1 of `seed`.
AprioriReport apriori_estimate_report(const FieldModel& model, double p, std::size_t paths,
                                      std::uint64_t seed, std::size_t workers = 1);

}  // namespace itolp
