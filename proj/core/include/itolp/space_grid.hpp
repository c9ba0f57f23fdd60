#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace itolp {

/// Uniform cell-centred grid on the box [-L, L]^d. Cells are numbered
/// axis-0-fastest: cell = sum_a i_a n^a.
class SpaceGrid {
public:
    SpaceGrid(std::size_t dim, double half_width, std::size_t cells_per_axis);

    std::size_t dim() const noexcept { return dim_; }
    double half_width() const noexcept { return half_width_; }
    std::size_t cells_per_axis() const noexcept { return n_; }
    double spacing() const noexcept { return spacing_; }
    std::size_t size() const noexcept { return size_; }
    double cell_volume() const noexcept { return volume_; }

    std::size_t stride(std::size_t axis) const noexcept { return strides_[axis]; }
    std::size_t coordinate(std::size_t cell, std::size_t axis) const noexcept
    {
        return (cell / strides_[axis]) % n_;
    }
    double center(std::size_t cell, std::size_t axis) const noexcept
    {
        return -half_width_ + (static_cast<double>(coordinate(cell, axis)) + 0.5) * spacing_;
    }
    void center(std::size_t cell, std::span<double> x) const noexcept;
    /// True when the cell lies within `width` cells of the boundary.
    bool in_margin(std::size_t cell, std::size_t width) const noexcept;

    bool operator==(const SpaceGrid& other) const noexcept
    {
        return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
    }

private:
    std::size_t dim_;
    double half_width_;
    std::size_t n_;
    double spacing_;
    std::size_t size_;
    double volume_;
    std::vector<std::size_t> strides_;
};

/// Read-only view of an R^M-valued grid function stored cell-major,
/// component-minor: values[cell * components + i].
struct FieldView {
    const SpaceGrid* grid = nullptr;
    std::size_t components = 1;
    std::span<const double> values;

    std::span<const double> at(std::size_t cell) const noexcept
    {
        return values.subspan(cell * components, components);
    }
};

using PointFn = std::function<void(std::span<const double> x, std::span<double> out)>;
using ScalarPointFn = std::function<double(std::span<const double> x)>;

class Field {
public:
    Field(SpaceGrid grid, std::size_t components);
    Field(SpaceGrid grid, std::size_t components, std::vector<double> values);

    /// fn evaluated at every cell centre.
    static Field sample(const SpaceGrid& grid, std::size_t components, const PointFn& fn);
    static Field sample(const SpaceGrid& grid, const ScalarPointFn& fn);

    const SpaceGrid& grid() const noexcept { return grid_; }
    std::size_t components() const noexcept { return components_; }
    std::span<double> at(std::size_t cell) noexcept
    {
        return {values_.data() + cell * components_, components_};
    }
    std::span<const double> at(std::size_t cell) const noexcept
    {
        return {values_.data() + cell * components_, components_};
    }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    FieldView view() const noexcept { return {&grid_, components_, values_}; }
    operator FieldView() const noexcept { return view(); }

private:
    SpaceGrid grid_;
    std::size_t components_;
    std::vector<double> values_;
};

/// int |u(x)|^p dx by the cell-centre rectangle rule (|.| Euclidean over components).
double lp_norm_pow(FieldView u, double p);
/// (int |u|^p dx)^{1/p}, p >= 1.
double lp_norm(FieldView u, double p);

/// Componentwise (u^i, phi) by the same rectangle rule. ConfigError when phi
/// does not vanish on the outermost cell layer.
std::vector<double> weak_pairing(FieldView u, const ScalarPointFn& test);

/// Throws ConfigError(`what`) when u is nonzero within `width` cells of the boundary.
void require_margin(FieldView u, std::size_t width, const char* what);

/// Central difference along `axis`, zero extension outside the box.
/// Requires a vanishing outermost cell layer.
Field fd_derivative(FieldView u, std::size_t axis);

/// CSV snapshot: header `cell,component,value`, then one row per value in
/// storage order (cell-major, component-minor), values printed round-trip exact.
void write_snapshot_csv(std::ostream& os, FieldView u);

/// Binary snapshot: 8-byte magic "ITLPFLD1", uint64 cell count, uint64
/// component count, then the values as IEEE-754 doubles in storage order
/// (native byte order).
void write_snapshot_binary(std::ostream& os, FieldView u);
Field read_snapshot_binary(std::istream& is, const SpaceGrid& grid);

}  // namespace itolp
