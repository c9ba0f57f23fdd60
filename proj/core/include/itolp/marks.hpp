#pragma once

#include "itolp/rng.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace itolp {

inline constexpr std::size_t kMaxMarkDim = 4;

/// A point of the mark space Z. Finite-set marks carry their index and a
/// scalar coordinate; box marks carry up to kMaxMarkDim coordinates.
struct Mark {
    std::array<double, kMaxMarkDim> coords{};
    std::size_t dim = 1;
    std::size_t index = 0;

    double operator[](std::size_t i) const noexcept { return coords[i]; }
    std::span<const double> view() const noexcept { return {coords.data(), dim}; }
};

/// Finite-activity mark space (Z, mu) with mu(Z) = lambda < infinity.
///
/// Integrals over Z use a fixed cubature: the exact weighted sum for a finite
/// set, a tensor midpoint rule with `resolution` cells per axis for a box.
class MarkSpace {
public:
    enum class Kind { finite_set, box };

    /// Points `values` with masses `masses` (mu({z_j}) = masses[j]).
    static MarkSpace finite_set(std::vector<double> values, std::vector<double> masses);
    /// `size` points 0, 1, ..., size-1 sharing total mass `total_mass` equally.
    static MarkSpace finite_uniform(std::size_t size, double total_mass);
    /// Box [lower, upper] with mu = total_mass * uniform law.
    static MarkSpace box(std::vector<double> lower, std::vector<double> upper,
                         double total_mass, std::size_t resolution);

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    double total_mass() const noexcept { return total_mass_; }

    /// Same mark law, total mass rescaled (truncation ladder Z_1 c Z_2 c ...).
    MarkSpace with_total_mass(double total_mass) const;

    Mark sample(Engine& rng) const;

    std::span<const Mark> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Cubature of fn over (Z, mu).
    template <class Fn>
    double integrate(Fn&& fn) const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j) s += weights_[j] * fn(nodes_[j]);
        return s;
    }

    /// Cubature of a vector-valued fn(z, out); `scratch` and `out` have equal size.
    void integrate(const std::function<void(const Mark&, std::span<double>)>& fn,
                   std::span<double> scratch, std::span<double> out) const;

    double mass_of(const std::function<bool(const Mark&)>& subset) const;

private:
    MarkSpace() = default;
    void build_nodes(std::size_t resolution);

    Kind kind_ = Kind::finite_set;
    std::size_t dim_ = 1;
    double total_mass_ = 0.0;
    std::vector<double> values_;
    std::vector<double> masses_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<Mark> nodes_;
    std::vector<double> weights_;
    std::discrete_distribution<std::size_t>::param_type law_;
};

}  // namespace itolp
