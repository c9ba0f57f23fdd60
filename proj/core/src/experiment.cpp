#include "itolp/experiment.hpp"

#include "itolp/errors.hpp"
#include "itolp/format.hpp"
#include "itolp/fubini.hpp"
#include "itolp/ito_lp.hpp"
#include "itolp/mollifier.hpp"
#include "itolp/parallel.hpp"
#include "itolp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace itolp {

namespace {

struct Sample {
    double t;
    std::string term;
    double value;
    bool stat = true;
};

using PathRows = std::vector<Sample>;

std::vector<double> report_times(const ExperimentConfig& cfg)
{
    return cfg.report_times.empty() ? std::vector<double>{cfg.horizon} : cfg.report_times;
}

void collect(Report& report, const std::vector<PathRows>& rows)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& s : rows[i]) {
            if (s.stat) {
                report.add_sample(i, s.t, s.term, s.value);
            } else {
                report.add(i, s.t, s.term, s.value);
            }
            if (s.term == "residual") report.add_residual(s.value);
        }
    }
}

std::string fmt(double v)
{
    return format_double(v);
}

void check_residuals(Report& report, const ExperimentConfig& cfg, const std::vector<std::pair<double, double>>& res)
{
    const auto it = cfg.tolerances.find("residual_rel");
    if (it == cfg.tolerances.end()) return;
    double worst = 0.0;
    for (const auto& [r, lhs] : res) worst = std::max(worst, std::abs(r) / (1.0 + std::abs(lhs)));
    report.check("residual_rel", worst <= it->second,
                 "max |residual|/(1+|lhs|) = " + fmt(worst) + ", tolerance " + fmt(it->second));
}

void run_fd(const ExperimentConfig& cfg, Report& report)
{
    const FdModel model = make_fd_model(cfg);
    const auto times = report_times(cfg);
    std::vector<PathRows> rows(cfg.paths);
    std::vector<std::vector<std::pair<double, double>>> res(cfg.paths);
    std::vector<double> gaps(cfg.paths);
    parallel_for(cfg.paths, cfg.workers, [&](std::size_t i) {
        const PathFD path = simulate_path_fd(model, cfg.seed, i);
        for (double t : times) {
            const auto b = eval_ito_fd(path, cfg.p, t);
            rows[i].push_back({b.t, "lhs", b.lhs});
            rows[i].push_back({b.t, "initial", b.initial});
            for (std::size_t j = 0; j < b.terms.size(); ++j) {
                rows[i].push_back({b.t, std::string(TermBreakdown::names[j]), b.terms[j]});
            }
            rows[i].push_back({b.t, "residual", b.residual});
            res[i].push_back({b.residual, b.lhs});
        }
        if (cfg.p == 2.0) {
            gaps[i] = energy_gap(path);
            rows[i].push_back({cfg.horizon, "energy_gap", gaps[i]});
        }
        if (!cfg.marks.ladder.empty()) {
            auto rng = make_engine(cfg.seed, i, Stream::jumps);
            const auto streams = sample_jump_ladder(model.marks, cfg.marks.ladder, model.grid, rng);
            for (std::size_t l = 0; l < streams.size(); ++l) {
                const auto grid = merge_jump_times(model.grid, streams[l]);
                auto wrng = make_engine(cfg.seed, i, Stream::wiener);
                const auto wiener = sample_wiener(grid, model.drivers.n_wiener, wrng);
                const auto lp = build_path_fd(model.drivers, model.marks.with_total_mass(cfg.marks.ladder[l]),
                                              streams[l], wiener, model.x0, grid);
                const auto b = eval_ito_fd(lp, cfg.p, cfg.horizon);
                rows[i].push_back({cfg.horizon, "ladder" + std::to_string(l) + ".residual", b.residual});
            }
        }
    });
    collect(report, rows);
    std::vector<std::pair<double, double>> all;
    for (const auto& r : res) all.insert(all.end(), r.begin(), r.end());
    check_residuals(report, cfg, all);
    if (cfg.p == 2.0) {
        if (const auto it = cfg.tolerances.find("energy_sigmas"); it != cfg.tolerances.end()) {
            StatResult s;
            s.paths = cfg.paths;
            for (double g : gaps) s.mean += g;
            s.mean /= static_cast<double>(cfg.paths);
            double ss = 0.0;
            for (double g : gaps) ss += (g - s.mean) * (g - s.mean);
            s.std_err = cfg.paths > 1 ? std::sqrt(ss / static_cast<double>(cfg.paths - 1) / static_cast<double>(cfg.paths)) : 0.0;
            report.check("energy_identity", s.within(it->second),
                         "mean gap " + fmt(s.mean) + ", std err " + fmt(s.std_err));
        }
    }
}

void run_lp(const ExperimentConfig& cfg, Report& report, LpMode mode)
{
    const FieldModel model = make_field_model(cfg, mode);
    const auto times = report_times(cfg);
    const bool collapse = mode == LpMode::thm21 && cfg.dim == 1;
    std::vector<PathRows> rows(cfg.paths);
    std::vector<std::vector<std::pair<double, double>>> res(cfg.paths);
    std::vector<double> collapse_gap(cfg.paths, 0.0);
    parallel_for(cfg.paths, cfg.workers, [&](std::size_t i) {
        const FieldPath fp = simulate_field_path(model, cfg.seed, i);
        for (double t : times) {
            const auto b = eval_ito_lp(fp, cfg.p, t, mode);
            rows[i].push_back({b.t, "lhs", b.lhs});
            rows[i].push_back({b.t, "init", b.init});
            for (const auto term : b.active()) {
                rows[i].push_back({b.t, std::string(LpTermBreakdown::names[static_cast<std::size_t>(term)]), b[term]});
            }
            rows[i].push_back({b.t, "residual", b.residual});
            res[i].push_back({b.residual, b.lhs});
            if (collapse) {
                const auto s = eval_ito_lp_simple(fp, cfg.p, t);
                const double gap = std::abs(s.residual - b.residual) / (1.0 + std::abs(b.lhs));
                rows[i].push_back({b.t, "simple_form_gap", gap});
                collapse_gap[i] = std::max(collapse_gap[i], gap);
            }
        }
    });
    collect(report, rows);
    std::vector<std::pair<double, double>> all;
    for (const auto& r : res) all.insert(all.end(), r.begin(), r.end());
    check_residuals(report, cfg, all);
    if (collapse) {
        if (const auto it = cfg.tolerances.find("collapse_rel"); it != cfg.tolerances.end()) {
            const double worst = *std::max_element(collapse_gap.begin(), collapse_gap.end());
            report.check("simple_form_collapse", worst <= it->second, "max relative gap " + fmt(worst));
        }
    }
}

void run_mollifier(const ExperimentConfig& cfg, Report& report)
{
    const FieldModel model = make_field_model(cfg, LpMode::thm21);
    const double slack = cfg.tolerance("contraction_slack", 1e-12);
    std::vector<PathRows> rows(cfg.paths);
    std::vector<char> contracts(cfg.paths, 1), monotone(cfg.paths, 1);
    std::vector<double> dual(cfg.paths, 0.0);
    parallel_for(cfg.paths, cfg.workers, [&](std::size_t i) {
        const FieldPath fp = simulate_field_path(model, cfg.seed, i);
        const FieldView u = fp.at(fp.grid.size() - 1);
        const double norm_u = lp_norm(u, cfg.p);
        double previous = INFINITY;
        rows[i].push_back({cfg.horizon, "norm", norm_u});
        for (double e : cfg.eps_cells) {
            const MollKernel kernel(fp.space, e * fp.space.spacing());
            const Field ue = mollify(u, kernel);
            Field diff = ue;
            for (std::size_t j = 0; j < diff.values().size(); ++j) diff.values()[j] -= u.values[j];
            const double norm_e = lp_norm(ue, cfg.p);
            const double dist = lp_norm(diff, cfg.p);
            const auto d = ito_lp_mollified_consistency(fp, kernel, cfg.p, cfg.horizon);
            const std::string tag = "eps" + fmt(e) + ".";
            rows[i].push_back({cfg.horizon, tag + "norm", norm_e});
            rows[i].push_back({cfg.horizon, tag + "distance", dist});
            rows[i].push_back({cfg.horizon, tag + "residual", d.field.residual});
            rows[i].push_back({cfg.horizon, tag + "pointwise_residual", d.pointwise_residual});
            const double gap = d.difference / (1.0 + std::abs(d.field.lhs));
            rows[i].push_back({cfg.horizon, tag + "dual_route_gap", gap});
            if (norm_e > norm_u + slack) contracts[i] = 0;
            if (!(dist < previous) && !(dist == 0.0 && previous == 0.0)) monotone[i] = 0;
            previous = dist;
            dual[i] = std::max(dual[i], gap);
        }
    });
    collect(report, rows);
    const auto all = [](const std::vector<char>& v) { return std::all_of(v.begin(), v.end(), [](char c) { return c != 0; }); };
    report.check("contraction", all(contracts), "slack " + fmt(slack));
    if (cfg.tolerances.count("convergence")) report.check("convergence", all(monotone), "distance decreases along eps");
    if (const auto it = cfg.tolerances.find("dual_route_rel"); it != cfg.tolerances.end()) {
        const double worst = *std::max_element(dual.begin(), dual.end());
        report.check("dual_route", worst <= it->second, "max relative gap " + fmt(worst));
    }
}

void run_fubini(const ExperimentConfig& cfg, Report& report)
{
    const MarkSpace marks = make_mark_space(cfg);
    const TimeGrid base = TimeGrid::uniform(cfg.horizon, cfg.n_steps);
    const ScalarDriver shape = make_driver(cfg.fubini_integrand, cfg.seed);
    const ParamFunction fn = [&shape](double t, const Mark& z, double lambda) {
        const double x[1] = {lambda};
        return shape(t, x, &z);
    };
    const ParamMeasure pm{cfg.param_points, cfg.param_weights};
    report.set_condition("fubini_cond", fubini_cond_value(fn, pm, marks, base));
    report.set_condition("protter_cond", protter_cond_value(fn, pm, marks, base));
    report.set_condition("pi_cond", pi_cond_value(fn, pm, marks, base));

    const double tol = cfg.tolerance("fubini_rel", 1e-12);
    std::vector<PathRows> rows(cfg.paths);
    std::vector<double> worst(cfg.paths, 0.0);
    parallel_for(cfg.paths, cfg.workers, [&](std::size_t i) {
        auto rng = make_engine(cfg.seed, i, Stream::jumps);
        const JumpStream js = sample_jump_stream(marks, base, rng);
        const TimeGrid grid = merge_jump_times(base, js);
        const auto tilde = fubini_tilde_check(fn, pm, js, marks, grid, cfg.horizon);
        const auto pi = fubini_pi_check(fn, pm, js, marks, grid, cfg.horizon);
        rows[i] = {{cfg.horizon, "atoms", static_cast<double>(js.size())},
                   {cfg.horizon, "tilde_lhs", tilde.lhs},
                   {cfg.horizon, "tilde_rhs", tilde.rhs},
                   {cfg.horizon, "pi_lhs", pi.lhs},
                   {cfg.horizon, "pi_rhs", pi.rhs}};
        worst[i] = std::max(std::abs(tilde.lhs - tilde.rhs) / (1.0 + std::abs(tilde.lhs)),
                            std::abs(pi.lhs - pi.rhs) / (1.0 + std::abs(pi.lhs)));
    });
    collect(report, rows);
    const double w = *std::max_element(worst.begin(), worst.end());
    report.check("fubini", w <= tol, "max relative gap " + fmt(w) + ", tolerance " + fmt(tol));
}

void run_apriori(const ExperimentConfig& cfg, Report& report)
{
    const double factor = cfg.tolerance("stability_factor", 2.0);
    double max_k = 0.0;
    double max_2k = 0.0;
    bool finite = true;
    for (std::size_t c = 0; c < cfg.apriori_configs; ++c) {
        ExperimentConfig sub = cfg;
        sub.seed = splitmix64(cfg.seed + c);
        const double p = cfg.apriori_p[c % cfg.apriori_p.size()];
        const FieldModel model = make_field_model(sub, LpMode::thm22);
        const auto a = apriori_estimate_report(model, p, cfg.paths, sub.seed, cfg.workers);
        const auto b = apriori_estimate_report(model, p, 2 * cfg.paths, sub.seed, cfg.workers);
        report.add(c, cfg.horizon, "p", p);
        report.add(c, cfg.horizon, "lhs", b.lhs);
        for (const auto& [name, v] : b.components) report.add(c, cfg.horizon, name, v);
        report.add(c, cfg.horizon, "ratio_K", a.ratio);
        report.add(c, cfg.horizon, "ratio_2K", b.ratio);
        finite = finite && std::isfinite(a.ratio) && std::isfinite(b.ratio);
        max_k = std::max(max_k, a.ratio);
        max_2k = std::max(max_2k, b.ratio);
    }
    report.set_value("max_ratio_K", max_k);
    report.set_value("max_ratio_2K", max_2k);
    report.check("ratio_finite", finite, "every configuration has a finite ratio");
    const bool stable = (max_k == 0.0 && max_2k == 0.0) ||
                        (max_2k <= factor * max_k && max_k <= factor * max_2k);
    report.check("ratio_stable", stable, "max ratio " + fmt(max_k) + " (K) vs " + fmt(max_2k) + " (2K)");
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg)
{
    validate(cfg);
    Report report(cfg.id, std::string(to_string(cfg.kind)));
    switch (cfg.kind) {
    case ExperimentKind::fd_ito: run_fd(cfg, report); break;
    case ExperimentKind::lp_ito_thm21: run_lp(cfg, report, LpMode::thm21); break;
    case ExperimentKind::lp_ito_thm22: run_lp(cfg, report, LpMode::thm22); break;
    case ExperimentKind::mollifier_study: run_mollifier(cfg, report); break;
    case ExperimentKind::fubini: run_fubini(cfg, report); break;
    case ExperimentKind::apriori_sweep: run_apriori(cfg, report); break;
    }
    report.finalize();
    return report;
}

void write_report(const Report& report, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / (report.experiment() + ".csv"), std::ios::binary);
    std::ofstream json(out_dir / (report.experiment() + ".json"), std::ios::binary);
    if (!csv || !json) throw ConfigError("cannot write reports to " + out_dir.string());
    report.write_csv(csv);
    report.write_json(json);
}

}  // namespace itolp
