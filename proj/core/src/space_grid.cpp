#include "itolp/space_grid.hpp"

#include "itolp/errors.hpp"
#include "itolp/format.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace itolp {

SpaceGrid::SpaceGrid(std::size_t dim, double half_width, std::size_t cells_per_axis)
    : dim_(dim), half_width_(half_width), n_(cells_per_axis)
{
    if (dim == 0 || dim > 3) throw ConfigError("space grid: dimension d must be 1, 2 or 3");
    if (!std::isfinite(half_width) || half_width <= 0.0) {
        throw ConfigError("space grid: half width L must be positive");
    }
    if (cells_per_axis < 3) throw ConfigError("space grid: need at least 3 cells per axis");
    spacing_ = 2.0 * half_width / static_cast<double>(n_);
    size_ = 1;
    strides_.resize(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        strides_[a] = size_;
        size_ *= n_;
    }
    volume_ = std::pow(spacing_, static_cast<double>(dim));
}

void SpaceGrid::center(std::size_t cell, std::span<double> x) const noexcept
{
    for (std::size_t a = 0; a < dim_; ++a) x[a] = center(cell, a);
}

bool SpaceGrid::in_margin(std::size_t cell, std::size_t width) const noexcept
{
    for (std::size_t a = 0; a < dim_; ++a) {
        const std::size_t i = coordinate(cell, a);
        if (i < width || i + width >= n_) return true;
    }
    return false;
}

Field::Field(SpaceGrid grid, std::size_t components)
    : grid_(std::move(grid)), components_(components), values_(grid_.size() * components, 0.0)
{
}

Field::Field(SpaceGrid grid, std::size_t components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values))
{
    if (values_.size() != grid_.size() * components_) {
        throw ConfigError("field: value count does not match grid size x components");
    }
}

Field Field::sample(const SpaceGrid& grid, std::size_t components, const PointFn& fn)
{
    Field f(grid, components);
    std::vector<double> x(grid.dim());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        grid.center(c, x);
        fn(x, f.at(c));
    }
    return f;
}

Field Field::sample(const SpaceGrid& grid, const ScalarPointFn& fn)
{
    return sample(grid, 1, [&](std::span<const double> x, std::span<double> out) { out[0] = fn(x); });
}

double lp_norm_pow(FieldView u, double p)
{
    double s = 0.0;
    for (std::size_t c = 0; c < u.grid->size(); ++c) {
        const auto v = u.at(c);
        double r2 = 0.0;
        for (double x : v) r2 += x * x;
        if (r2 == 0.0) continue;
        s += p == 2.0 ? r2 : std::pow(std::sqrt(r2), p);
    }
    return s * u.grid->cell_volume();
}

double lp_norm(FieldView u, double p)
{
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    return std::pow(lp_norm_pow(u, p), 1.0 / p);
}

std::vector<double> weak_pairing(FieldView u, const ScalarPointFn& test)
{
    const auto& grid = *u.grid;
    std::vector<double> out(u.components, 0.0);
    std::vector<double> x(grid.dim());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        grid.center(c, x);
        const double phi = test(x);
        if (phi != 0.0 && grid.in_margin(c, 1)) {
            throw ConfigError("weak_pairing: test function support overflows the grid");
        }
        const auto v = u.at(c);
        for (std::size_t i = 0; i < u.components; ++i) out[i] += v[i] * phi;
    }
    for (double& v : out) v *= grid.cell_volume();
    return out;
}

void require_margin(FieldView u, std::size_t width, const char* what)
{
    const auto& grid = *u.grid;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (!grid.in_margin(c, width)) continue;
        for (double v : u.at(c)) {
            if (v != 0.0) {
                throw ConfigError(std::string(what) + ": field does not vanish within " +
                                  std::to_string(width) + " cell(s) of the boundary");
            }
        }
    }
}

Field fd_derivative(FieldView u, std::size_t axis)
{
    const auto& grid = *u.grid;
    if (axis >= grid.dim()) throw ConfigError("fd_derivative: axis out of range");
    require_margin(u, 1, "fd_derivative");
    Field out(grid, u.components);
    const std::size_t n = grid.cells_per_axis();
    const std::size_t stride = grid.stride(axis);
    const double inv = 1.0 / (2.0 * grid.spacing());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const std::size_t i = grid.coordinate(c, axis);
        auto d = out.at(c);
        for (std::size_t m = 0; m < u.components; ++m) {
            const double up = i + 1 < n ? u.values[(c + stride) * u.components + m] : 0.0;
            const double down = i > 0 ? u.values[(c - stride) * u.components + m] : 0.0;
            d[m] = (up - down) * inv;
        }
    }
    return out;
}

void write_snapshot_csv(std::ostream& os, FieldView u)
{
    os << "cell,component,value\n";
    for (std::size_t c = 0; c < u.grid->size(); ++c) {
        const auto v = u.at(c);
        for (std::size_t i = 0; i < u.components; ++i) {
            os << c << ',' << i << ',' << format_double(v[i]) << '\n';
        }
    }
}

namespace {
constexpr char kMagic[8] = {'I', 'T', 'L', 'P', 'F', 'L', 'D', '1'};
}

void write_snapshot_binary(std::ostream& os, FieldView u)
{
    const std::uint64_t cells = u.grid->size();
    const std::uint64_t comps = u.components;
    os.write(kMagic, sizeof kMagic);
    os.write(reinterpret_cast<const char*>(&cells), sizeof cells);
    os.write(reinterpret_cast<const char*>(&comps), sizeof comps);
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
}

Field read_snapshot_binary(std::istream& is, const SpaceGrid& grid)
{
    char magic[8];
    std::uint64_t cells = 0;
    std::uint64_t comps = 0;
    is.read(magic, sizeof magic);
    is.read(reinterpret_cast<char*>(&cells), sizeof cells);
    is.read(reinterpret_cast<char*>(&comps), sizeof comps);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0 || cells != grid.size()) {
        throw ConfigError("read_snapshot_binary: bad header");
    }
    std::vector<double> values(cells * comps);
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is) throw ConfigError("read_snapshot_binary: truncated data");
    return Field(grid, comps, std::move(values));
}

}  // namespace itolp
