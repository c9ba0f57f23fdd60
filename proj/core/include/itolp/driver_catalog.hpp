#pragma once

#include "itolp/marks.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itolp {

struct ParamSchema {
    std::string name;
    double default_value = 0.0;
    std::string description;
};

struct CatalogEntry {
    std::string id;
    std::string description;
    std::vector<ParamSchema> params;
};

/// Built-in scalar driver shapes. Every entry also accepts `mark=one|identity`
/// (identity multiplies the value by the first mark coordinate).
const std::vector<CatalogEntry>& driver_catalog();
const CatalogEntry& catalog_entry(std::string_view id);

/// "id k=v k=v ..." with every catalog parameter filled in.
struct DriverSpec {
    std::string id;
    std::map<std::string, double> params;
    std::string mark = "one";

    double operator[](const std::string& key) const { return params.at(key); }
    bool operator==(const DriverSpec&) const = default;
};

/// ConfigError naming the id or parameter on unknown ids, unknown keys or bad numbers.
DriverSpec parse_driver_spec(std::string_view text);
/// Canonical text: id followed by every parameter in schema order, then mark.
std::string format_driver_spec(const DriverSpec& spec);

/// f(t, x, z); x may be empty (no spatial variable), z may be null (no mark).
using ScalarDriver = std::function<double(double t, std::span<const double> x, const Mark* z)>;

/// `seed` feeds the randomized entry (together with its `salt` parameter).
ScalarDriver make_driver(const DriverSpec& spec, std::uint64_t seed);

}  // namespace itolp
