#include "itolp/config.hpp"

#include "itolp/errors.hpp"
#include "itolp/format.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace itolp {

namespace {

using Section = std::map<std::string, std::string>;
using Sections = std::map<std::string, Section>;

constexpr std::array<std::string_view, 6> kind_names{"fd_ito",          "lp_ito_thm21", "lp_ito_thm22",
                                                     "mollifier_study", "fubini",       "apriori_sweep"};

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"kind", "id", "p", "paths", "seed", "workers"}},
        {"time", {"T", "n_steps", "report_times"}},
        {"space", {"d", "L", "n", "margin"}},
        {"marks", {"kind", "size", "mass", "lower", "upper", "resolution", "ladder"}},
        {"wiener", {"R"}},
        {"drivers", {}},
        {"mollifier", {"eps"}},
        {"fubini", {"points", "weights", "integrand"}},
        {"apriori", {"configs", "p_values"}},
        {"tolerances", {}},
    };
    return keys;
}

[[noreturn]] void fail(std::string_view section, std::string_view key, const std::string& what)
{
    throw ConfigError("[" + std::string(section) + "] " + std::string(key) + ": " + what);
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double to_double(std::string_view section, std::string_view key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "inf") return INFINITY;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) fail(section, key, "not a number: " + text);
    return v;
}

std::uint64_t to_uint(std::string_view section, std::string_view key, const std::string& text)
{
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        fail(section, key, "not a nonnegative integer: " + text);
    }
    return v;
}

std::vector<double> to_list(std::string_view section, std::string_view key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(section, key, item));
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

Sections read_sections(std::istream& in)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    Sections out;
    for (const auto& [name, section] : tree) {
        const auto known = known_keys().find(name);
        if (known == known_keys().end()) throw ConfigError("config: unknown section [" + name + "]");
        if (!section.data().empty() && section.empty()) {
            throw ConfigError("config: key " + name + " outside of any section");
        }
        for (const auto& [key, value] : section) {
            if (!known->second.empty() && !known->second.count(key)) fail(name, key, "unknown key");
            out[name][key] = value.data();
        }
    }
    return out;
}

// Driver key grammar: name, name.<i>, and for g also g.<i>.<r>; flux.<a>.
struct DriverKey {
    std::string name;
    std::vector<std::size_t> index;
};

DriverKey split_key(const std::string& key)
{
    DriverKey k;
    std::stringstream ss(key);
    std::string part;
    std::getline(ss, k.name, '.');
    while (std::getline(ss, part, '.')) k.index.push_back(to_uint("drivers", key, part));
    return k;
}

const DriverSpec* lookup(const ExperimentConfig& cfg, const std::string& key)
{
    const auto it = cfg.drivers.find(key);
    return it == cfg.drivers.end() ? nullptr : &it->second;
}

const DriverSpec* component(const ExperimentConfig& cfg, const std::string& name, std::size_t i)
{
    if (const auto* s = lookup(cfg, name + "." + std::to_string(i))) return s;
    return lookup(cfg, name);
}

const DriverSpec* diffusion_entry(const ExperimentConfig& cfg, std::size_t i, std::size_t r)
{
    if (const auto* s = lookup(cfg, "g." + std::to_string(i) + "." + std::to_string(r))) return s;
    if (const auto* s = lookup(cfg, "g." + std::to_string(r))) return s;
    return lookup(cfg, "g");
}

std::vector<ScalarDriver> components(const ExperimentConfig& cfg, const std::string& name)
{
    std::vector<ScalarDriver> out(cfg.dim);
    for (std::size_t i = 0; i < cfg.dim; ++i) {
        if (const auto* s = component(cfg, name, i)) out[i] = make_driver(*s, cfg.seed);
    }
    return out;
}

std::vector<ScalarDriver> diffusion_entries(const ExperimentConfig& cfg)
{
    std::vector<ScalarDriver> out(cfg.dim * cfg.n_wiener);
    for (std::size_t i = 0; i < cfg.dim; ++i) {
        for (std::size_t r = 0; r < cfg.n_wiener; ++r) {
            if (const auto* s = diffusion_entry(cfg, i, r)) out[i * cfg.n_wiener + r] = make_driver(*s, cfg.seed);
        }
    }
    return out;
}

bool any(const std::vector<ScalarDriver>& v)
{
    return std::any_of(v.begin(), v.end(), [](const ScalarDriver& f) { return static_cast<bool>(f); });
}

void fill(const std::vector<ScalarDriver>& comps, double t, std::span<const double> x, const Mark* z,
          std::span<double> out)
{
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = comps[i] ? comps[i](t, x, z) : 0.0;
}

bool is_field_kind(ExperimentKind k)
{
    return k != ExperimentKind::fd_ito && k != ExperimentKind::fubini;
}

}  // namespace

std::string_view to_string(ExperimentKind kind)
{
    return kind_names[static_cast<std::size_t>(kind)];
}

ExperimentKind parse_kind(std::string_view text)
{
    for (std::size_t i = 0; i < kind_names.size(); ++i) {
        if (kind_names[i] == text) return static_cast<ExperimentKind>(i);
    }
    throw ConfigError("[experiment] kind: unknown experiment kind " + std::string(text));
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const
{
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

ExperimentConfig parse_config(std::istream& in)
{
    const Sections s = read_sections(in);
    ExperimentConfig cfg;
    const auto get = [&](const char* section, const char* key, auto&& apply) {
        const auto sec = s.find(section);
        if (sec == s.end()) return;
        const auto it = sec->second.find(key);
        if (it != sec->second.end()) apply(it->second);
    };
    const auto num = [&](const char* section, const char* key, double& out) {
        get(section, key, [&](const std::string& v) { out = to_double(section, key, v); });
    };
    const auto count = [&](const char* section, const char* key, auto& out) {
        get(section, key, [&](const std::string& v) { out = static_cast<std::decay_t<decltype(out)>>(to_uint(section, key, v)); });
    };
    const auto list = [&](const char* section, const char* key, std::vector<double>& out) {
        get(section, key, [&](const std::string& v) { out = to_list(section, key, v); });
    };

    get("experiment", "kind", [&](const std::string& v) { cfg.kind = parse_kind(trim(v)); });
    get("experiment", "id", [&](const std::string& v) { cfg.id = trim(v); });
    num("experiment", "p", cfg.p);
    count("experiment", "paths", cfg.paths);
    count("experiment", "seed", cfg.seed);
    count("experiment", "workers", cfg.workers);

    num("time", "T", cfg.horizon);
    count("time", "n_steps", cfg.n_steps);
    list("time", "report_times", cfg.report_times);

    count("space", "d", cfg.space_dim);
    num("space", "L", cfg.half_width);
    count("space", "n", cfg.cells);
    count("space", "margin", cfg.margin);

    get("marks", "kind", [&](const std::string& v) { cfg.marks.kind = trim(v); });
    count("marks", "size", cfg.marks.size);
    num("marks", "mass", cfg.marks.mass);
    list("marks", "lower", cfg.marks.lower);
    list("marks", "upper", cfg.marks.upper);
    count("marks", "resolution", cfg.marks.resolution);
    list("marks", "ladder", cfg.marks.ladder);

    count("wiener", "R", cfg.n_wiener);

    if (const auto d = s.find("drivers"); d != s.end()) {
        for (const auto& [key, value] : d->second) {
            if (key == "M") {
                cfg.dim = to_uint("drivers", key, value);
                continue;
            }
            try {
                cfg.drivers[key] = parse_driver_spec(value);
            } catch (const ConfigError& e) {
                fail("drivers", key, e.what());
            }
        }
    }

    list("mollifier", "eps", cfg.eps_cells);
    list("fubini", "points", cfg.param_points);
    list("fubini", "weights", cfg.param_weights);
    get("fubini", "integrand", [&](const std::string& v) {
        try {
            cfg.fubini_integrand = parse_driver_spec(v);
        } catch (const ConfigError& e) {
            fail("fubini", "integrand", e.what());
        }
    });
    count("apriori", "configs", cfg.apriori_configs);
    list("apriori", "p_values", cfg.apriori_p);

    if (const auto t = s.find("tolerances"); t != s.end()) {
        for (const auto& [key, value] : t->second) cfg.tolerances[key] = to_double("tolerances", key, value);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in);
}

std::string to_ini(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    const auto num = [](double v) { return std::isinf(v) ? std::string("inf") : format_double(v); };
    os << "[experiment]\nkind = " << to_string(cfg.kind) << "\nid = " << cfg.id << "\np = " << num(cfg.p)
       << "\npaths = " << cfg.paths << "\nseed = " << cfg.seed << "\nworkers = " << cfg.workers << "\n\n";
    os << "[time]\nT = " << num(cfg.horizon) << "\nn_steps = " << cfg.n_steps << '\n';
    if (!cfg.report_times.empty()) os << "report_times = " << join(cfg.report_times) << '\n';
    os << "\n[space]\nd = " << cfg.space_dim << "\nL = " << num(cfg.half_width) << "\nn = " << cfg.cells
       << "\nmargin = " << cfg.margin << "\n\n";
    os << "[marks]\nkind = " << cfg.marks.kind << "\nsize = " << cfg.marks.size << "\nmass = " << num(cfg.marks.mass)
       << "\nlower = " << join(cfg.marks.lower) << "\nupper = " << join(cfg.marks.upper)
       << "\nresolution = " << cfg.marks.resolution << '\n';
    if (!cfg.marks.ladder.empty()) os << "ladder = " << join(cfg.marks.ladder) << '\n';
    os << "\n[wiener]\nR = " << cfg.n_wiener << "\n\n[drivers]\nM = " << cfg.dim << '\n';
    for (const auto& [key, spec] : cfg.drivers) os << key << " = " << format_driver_spec(spec) << '\n';
    os << "\n[mollifier]\neps = " << join(cfg.eps_cells) << "\n\n";
    os << "[fubini]\npoints = " << join(cfg.param_points) << "\nweights = " << join(cfg.param_weights)
       << "\nintegrand = " << format_driver_spec(cfg.fubini_integrand) << "\n\n";
    os << "[apriori]\nconfigs = " << cfg.apriori_configs << "\np_values = " << join(cfg.apriori_p) << '\n';
    if (!cfg.tolerances.empty()) {
        os << "\n[tolerances]\n";
        for (const auto& [key, v] : cfg.tolerances) os << key << " = " << num(v) << '\n';
    }
    return os.str();
}

void validate(const ExperimentConfig& cfg)
{
    const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!(cfg.p >= 2.0) || !std::isfinite(cfg.p)) {
        fail("experiment", "p", "p must be >= 2 (got " + format_double(cfg.p) + ")");
    }
    if (cfg.id.empty() || cfg.id.find_first_of("/\\,\"") != std::string::npos) {
        fail("experiment", "id", "must be non-empty without / \\ , or quotes");
    }
    if (cfg.paths == 0) fail("experiment", "paths", "must be positive");
    if (cfg.workers == 0) fail("experiment", "workers", "must be positive");
    if (!finite_pos(cfg.horizon)) fail("time", "T", "must be positive and finite");
    if (cfg.n_steps == 0) fail("time", "n_steps", "must be positive");
    for (double t : cfg.report_times) {
        if (!(t > 0.0 && t <= cfg.horizon)) fail("time", "report_times", "times must lie in (0, T]");
        const double steps = t / cfg.horizon * static_cast<double>(cfg.n_steps);
        if (std::abs(steps - std::round(steps)) > 1e-9 * static_cast<double>(cfg.n_steps)) {
            fail("time", "report_times", "times must be points of the uniform grid");
        }
    }
    if (cfg.space_dim == 0 || cfg.space_dim > 3) fail("space", "d", "must be 1, 2 or 3");
    if (!finite_pos(cfg.half_width)) fail("space", "L", "must be positive and finite");
    if (cfg.cells < 3) fail("space", "n", "need at least 3 cells per axis");
    if (cfg.margin == 0) fail("space", "margin", "must be at least 1");

    const auto& m = cfg.marks;
    if (m.kind != "finite" && m.kind != "box") fail("marks", "kind", "must be finite or box");
    if (!(std::isfinite(m.mass) && m.mass >= 0.0)) fail("marks", "mass", "must be finite and nonnegative");
    if (m.size == 0) fail("marks", "size", "must be positive");
    if (m.kind == "box") {
        if (m.lower.empty() || m.lower.size() != m.upper.size() || m.lower.size() > kMaxMarkDim) {
            fail("marks", "lower", "lower/upper must have equal length 1..4");
        }
        for (std::size_t i = 0; i < m.lower.size(); ++i) {
            if (!(m.lower[i] < m.upper[i])) fail("marks", "upper", "upper must exceed lower");
        }
        if (m.resolution == 0) fail("marks", "resolution", "must be positive");
    }
    for (std::size_t i = 0; i < m.ladder.size(); ++i) {
        if (!finite_pos(m.ladder[i]) || (i > 0 && !(m.ladder[i] > m.ladder[i - 1]))) {
            fail("marks", "ladder", "masses must be positive and strictly increasing");
        }
    }

    if (cfg.dim == 0 || cfg.dim > 8) fail("drivers", "M", "must be in 1..8");
    const bool field = is_field_kind(cfg.kind);
    const bool thm22 = cfg.kind == ExperimentKind::lp_ito_thm22 || cfg.kind == ExperimentKind::apriori_sweep;
    if (thm22 && cfg.dim != 1) fail("drivers", "M", "thm22 mode requires M = 1");
    for (const auto& [key, spec] : cfg.drivers) {
        const DriverKey k = split_key(key);
        const auto bad = [&](const std::string& why) { fail("drivers", key, why); };
        if (k.name == "f" || k.name == "h" || k.name == "hbar" || k.name == "X0" || k.name == "psi") {
            if (k.index.size() > 1 || (k.index.size() == 1 && k.index[0] >= cfg.dim)) bad("component index out of range");
            if (k.name == "hbar" && field) bad("raw-jump drivers are not part of field experiments");
            if (k.name == "X0" && field) bad("field experiments use psi for the initial condition");
            if (k.name == "psi" && !field) bad("use X0 for the initial value");
        } else if (k.name == "g") {
            if (k.index.size() > 2) bad("expected g, g.<r> or g.<i>.<r>");
            if (k.index.size() == 1 && k.index[0] >= cfg.n_wiener) bad("Wiener index out of range");
            if (k.index.size() == 2 && (k.index[0] >= cfg.dim || k.index[1] >= cfg.n_wiener)) bad("index out of range");
        } else if (k.name == "flux") {
            if (!thm22) bad("flux drivers are only used in thm22 mode");
            if (k.index.size() != 1 || k.index[0] < 1 || k.index[0] > cfg.space_dim) bad("expected flux.<a>, a = 1..d");
        } else {
            bad("unknown driver key");
        }
        if (spec.mark == "identity" && k.name != "h" && k.name != "hbar") bad("mark=identity only applies to jump drivers");
        make_driver(spec, cfg.seed);
    }

    for (double e : cfg.eps_cells) {
        if (!(e >= 2.0) || !std::isfinite(e)) fail("mollifier", "eps", "eps must be at least 2 grid spacings");
    }
    if (cfg.param_points.size() != cfg.param_weights.size() || cfg.param_points.empty()) {
        fail("fubini", "weights", "points and weights must be non-empty lists of equal length");
    }
    for (double w : cfg.param_weights) {
        if (!(std::isfinite(w) && w >= 0.0)) fail("fubini", "weights", "weights must be finite and nonnegative");
    }
    make_driver(cfg.fubini_integrand, cfg.seed);
    if (cfg.apriori_configs == 0) fail("apriori", "configs", "must be positive");
    for (double p : cfg.apriori_p) {
        if (!(p >= 2.0) || !std::isfinite(p)) fail("apriori", "p_values", "p must be >= 2");
    }
    for (const auto& [key, v] : cfg.tolerances) {
        if (!finite_pos(v)) fail("tolerances", key, "tolerances must be positive");
    }
}

MarkSpace make_mark_space(const ExperimentConfig& cfg)
{
    if (cfg.marks.kind == "box") {
        return MarkSpace::box(cfg.marks.lower, cfg.marks.upper, cfg.marks.mass, cfg.marks.resolution);
    }
    return MarkSpace::finite_uniform(cfg.marks.size, cfg.marks.mass);
}

FdModel make_fd_model(const ExperimentConfig& cfg)
{
    FdModel model;
    model.marks = make_mark_space(cfg);
    model.grid = TimeGrid::uniform(cfg.horizon, cfg.n_steps);
    auto& d = model.drivers;
    d.dim = cfg.dim;
    d.n_wiener = cfg.n_wiener;

    const auto f = components(cfg, "f");
    if (any(f)) d.drift = [f](double t, std::span<double> out) { fill(f, t, {}, nullptr, out); };
    const auto g = diffusion_entries(cfg);
    if (any(g)) d.diffusion = [g](double t, std::span<double> out) { fill(g, t, {}, nullptr, out); };
    const auto h = components(cfg, "h");
    if (any(h)) d.compensated = [h](double t, const Mark& z, std::span<double> out) { fill(h, t, {}, &z, out); };
    const auto hb = components(cfg, "hbar");
    if (any(hb)) d.raw = [hb](double t, const Mark& z, std::span<double> out) { fill(hb, t, {}, &z, out); };

    model.x0.assign(cfg.dim, 0.0);
    fill(components(cfg, "X0"), 0.0, {}, nullptr, model.x0);
    return model;
}

FieldModel make_field_model(const ExperimentConfig& cfg, LpMode mode)
{
    FieldModel model;
    model.marks = make_mark_space(cfg);
    model.space = SpaceGrid(cfg.space_dim, cfg.half_width, cfg.cells);
    model.grid = TimeGrid::uniform(cfg.horizon, cfg.n_steps);
    model.mode = mode;
    model.margin = cfg.margin;
    auto& d = model.drivers;
    d.dim = cfg.dim;
    d.n_wiener = cfg.n_wiener;

    const auto f = components(cfg, "f");
    if (any(f)) d.drift = [f](double t, std::span<const double> x, std::span<double> out) { fill(f, t, x, nullptr, out); };
    const auto g = diffusion_entries(cfg);
    if (any(g)) {
        d.diffusion = [g](double t, std::span<const double> x, std::span<double> out) { fill(g, t, x, nullptr, out); };
    }
    const auto h = components(cfg, "h");
    if (any(h)) {
        d.jump = [h](double t, std::span<const double> x, const Mark& z, std::span<double> out) {
            fill(h, t, x, &z, out);
        };
    }
    const auto psi = components(cfg, "psi");
    if (any(psi)) d.initial = [psi](std::span<const double> x, std::span<double> out) { fill(psi, 0.0, x, nullptr, out); };
    if (mode == LpMode::thm22) {
        for (std::size_t a = 1; a <= cfg.space_dim; ++a) {
            const auto* spec = lookup(cfg, "flux." + std::to_string(a));
            if (spec) {
                auto fn = make_driver(*spec, cfg.seed);
                d.flux.push_back([fn](double t, std::span<const double> x, std::span<double> out) {
                    out[0] = fn(t, x, nullptr);
                });
            } else {
                d.flux.push_back([](double, std::span<const double>, std::span<double> out) { out[0] = 0.0; });
            }
        }
    }
    return model;
}

}  // namespace itolp
