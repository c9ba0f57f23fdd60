#pragma once

#include "itolp/driver_catalog.hpp"
#include "itolp/field_process.hpp"
#include "itolp/marks.hpp"
#include "itolp/semimartingale.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace itolp {

enum class ExperimentKind { fd_ito, lp_ito_thm21, lp_ito_thm22, mollifier_study, fubini, apriori_sweep };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view text);

struct MarkConfig {
    std::string kind = "finite";  // finite | box
    std::size_t size = 1;
    double mass = 0.0;
    std::vector<double> lower{0.0};
    std::vector<double> upper{1.0};
    std::size_t resolution = 8;
    std::vector<double> ladder;  // optional truncation masses, increasing

    bool operator==(const MarkConfig&) const = default;
};

/// Parsed experiment description. Sections and keys:
///   [experiment] kind id p paths seed workers
///   [time]       T n_steps report_times
///   [space]      d L n margin
///   [marks]      kind size mass lower upper resolution ladder
///   [wiener]     R
///   [drivers]    M and driver specs keyed f, f.<i>, g, g.<r>, g.<i>.<r>, h, h.<i>,
///                hbar, hbar.<i>, X0, X0.<i>, psi, psi.<i>, flux.<a>
///   [mollifier]  eps            (in grid spacings, list)
///   [fubini]     points weights integrand
///   [apriori]    configs p_values
///   [tolerances] name = positive value
/// Lists are comma separated.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::fd_ito;
    std::string id = "experiment";
    double p = 2.0;
    std::size_t paths = 1;
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    double horizon = 1.0;
    std::size_t n_steps = 16;
    std::vector<double> report_times;  // empty: T only

    std::size_t space_dim = 1;
    double half_width = 1.0;
    std::size_t cells = 32;
    std::size_t margin = 1;

    MarkConfig marks;
    std::size_t n_wiener = 0;
    std::size_t dim = 1;
    std::map<std::string, DriverSpec> drivers;

    std::vector<double> eps_cells{8.0, 4.0, 2.0};

    std::vector<double> param_points{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> param_weights{1.0, 1.0, 1.0, 1.0, 1.0};
    DriverSpec fubini_integrand = parse_driver_spec("randomized radius=10");

    std::size_t apriori_configs = 10;
    std::vector<double> apriori_p{2.0, 4.0};

    std::map<std::string, double> tolerances;

    /// Tolerance `name`, or `fallback` when not configured.
    double tolerance(const std::string& name, double fallback) const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// ConfigError naming the section/key on any invalid entry.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// INI text that parses back to an equal configuration.
std::string to_ini(const ExperimentConfig& cfg);

/// Semantic checks (p >= 2, thm22 needs M = 1, positive tolerances, driver keys).
void validate(const ExperimentConfig& cfg);

MarkSpace make_mark_space(const ExperimentConfig& cfg);
FdModel make_fd_model(const ExperimentConfig& cfg);
FieldModel make_field_model(const ExperimentConfig& cfg, LpMode mode);

}  // namespace itolp
