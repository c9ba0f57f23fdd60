#include "itolp/driver_catalog.hpp"

#include "itolp/errors.hpp"
#include "itolp/format.hpp"
#include "itolp/rng.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace itolp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double radius_of(std::span<const double> x, double center)
{
    double s = 0.0;
    for (double v : x) s += (v - center) * (v - center);
    return std::sqrt(s);
}

// peak-normalised bump, equal to 1 at the centre
double unit_bump(double s)
{
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
}

double first(std::span<const double> x)
{
    return x.empty() ? 0.0 : x[0];
}

double parse_number(std::string_view key, std::string_view text)
{
    if (text == "inf") return inf;
    if (text == "-inf") return -inf;
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("driver parameter " + std::string(key) + ": not a number: " + std::string(text));
    }
    return v;
}

}  // namespace

const std::vector<CatalogEntry>& driver_catalog()
{
    static const std::vector<CatalogEntry> catalog{
        {"constant", "c", {{"c", 1.0, "value"}}},
        {"bump",
         "c exp(1 - 1/(1 - s^2)) for s = |x - center| / radius < 1, else 0",
         {{"c", 1.0, "peak value"}, {"center", 0.0, "centre (every axis)"}, {"radius", 0.5, "support radius"}}},
        {"indicator",
         "c on the ball |x - center| < radius, else 0",
         {{"c", 1.0, "value on the ball"}, {"center", 0.0, "centre (every axis)"}, {"radius", 0.5, "ball radius"}}},
        {"ramp",
         "(c + a t + b x_0) on |x| < radius, else 0",
         {{"c", 0.0, "offset"}, {"a", 0.0, "slope in t"}, {"b", 1.0, "slope in x_0"}, {"radius", inf, "window radius"}}},
        {"sinusoid",
         "c sin(k x_0 + w t + phase) on |x| < radius, else 0",
         {{"c", 1.0, "amplitude"},
          {"k", 1.0, "wave number"},
          {"w", 0.0, "angular frequency"},
          {"phase", 0.0, "phase"},
          {"radius", inf, "window radius"}}},
        {"randomized",
         "bump(|x| / radius) sum_j a_j cos(j (pi x_0 / radius + t) + phi_j), a_j ~ U(-scale, scale), "
         "phi_j ~ U(0, 2 pi), drawn from (seed, salt)",
         {{"scale", 1.0, "coefficient range"},
          {"radius", 0.5, "support radius"},
          {"modes", 3.0, "number of modes"},
          {"salt", 0.0, "coefficient stream index"}}},
    };
    return catalog;
}

const CatalogEntry& catalog_entry(std::string_view id)
{
    for (const auto& e : driver_catalog()) {
        if (e.id == id) return e;
    }
    throw ConfigError("unknown driver id: " + std::string(id));
}

DriverSpec parse_driver_spec(std::string_view text)
{
    std::istringstream in{std::string(text)};
    DriverSpec spec;
    if (!(in >> spec.id)) throw ConfigError("empty driver spec");
    const auto& entry = catalog_entry(spec.id);
    for (const auto& p : entry.params) spec.params[p.name] = p.default_value;
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ConfigError("driver " + spec.id + ": expected key=value, got " + token);
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "mark") {
            if (value != "one" && value != "identity") {
                throw ConfigError("driver " + spec.id + ": mark must be one or identity");
            }
            spec.mark = value;
            continue;
        }
        auto it = spec.params.find(key);
        if (it == spec.params.end()) throw ConfigError("driver " + spec.id + ": unknown parameter " + key);
        it->second = parse_number(key, value);
    }
    return spec;
}

std::string format_driver_spec(const DriverSpec& spec)
{
    std::string out = spec.id;
    for (const auto& p : catalog_entry(spec.id).params) {
        const double v = spec[p.name];
        out += ' ' + p.name + '=' + (std::isinf(v) ? (v > 0 ? "inf" : "-inf") : format_double(v));
    }
    out += " mark=" + spec.mark;
    return out;
}

ScalarDriver make_driver(const DriverSpec& spec, std::uint64_t seed)
{
    ScalarDriver base;
    if (spec.id == "constant") {
        const double c = spec["c"];
        base = [c](double, std::span<const double>, const Mark*) { return c; };
    } else if (spec.id == "bump") {
        const double c = spec["c"], center = spec["center"], radius = spec["radius"];
        if (!(radius > 0.0)) throw ConfigError("driver bump: radius must be positive");
        base = [=](double, std::span<const double> x, const Mark*) {
            return c * unit_bump(radius_of(x, center) / radius);
        };
    } else if (spec.id == "indicator") {
        const double c = spec["c"], center = spec["center"], radius = spec["radius"];
        base = [=](double, std::span<const double> x, const Mark*) {
            return radius_of(x, center) < radius ? c : 0.0;
        };
    } else if (spec.id == "ramp") {
        const double c = spec["c"], a = spec["a"], b = spec["b"], radius = spec["radius"];
        base = [=](double t, std::span<const double> x, const Mark*) {
            return radius_of(x, 0.0) < radius ? c + a * t + b * first(x) : 0.0;
        };
    } else if (spec.id == "sinusoid") {
        const double c = spec["c"], k = spec["k"], w = spec["w"], phase = spec["phase"], radius = spec["radius"];
        base = [=](double t, std::span<const double> x, const Mark*) {
            return radius_of(x, 0.0) < radius ? c * std::sin(k * first(x) + w * t + phase) : 0.0;
        };
    } else if (spec.id == "randomized") {
        const double scale = spec["scale"], radius = spec["radius"], modes = spec["modes"], salt = spec["salt"];
        if (!(radius > 0.0)) throw ConfigError("driver randomized: radius must be positive");
        if (!(modes >= 1.0 && modes <= 64.0)) throw ConfigError("driver randomized: modes must be in [1, 64]");
        if (!(salt >= 0.0)) throw ConfigError("driver randomized: salt must be nonnegative");
        auto rng = make_engine(seed, static_cast<std::uint64_t>(salt), Stream::coefficients);
        std::uniform_real_distribution<double> amp(-scale, scale);
        std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
        std::vector<double> a(static_cast<std::size_t>(modes)), phi(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            a[j] = amp(rng);
            phi[j] = ph(rng);
        }
        base = [=](double t, std::span<const double> x, const Mark*) {
            const double env = unit_bump(radius_of(x, 0.0) / radius);
            if (env == 0.0) return 0.0;
            const double arg = std::numbers::pi * first(x) / radius + t;
            double s = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::cos(static_cast<double>(j + 1) * arg + phi[j]);
            return env * s;
        };
    } else {
        throw ConfigError("unknown driver id: " + spec.id);
    }
    if (spec.mark == "identity") {
        return [base](double t, std::span<const double> x, const Mark* z) {
            return z ? (*z)[0] * base(t, x, z) : 0.0;
        };
    }
    return base;
}

}  // namespace itolp
