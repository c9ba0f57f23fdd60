#include "itolp/marks.hpp"

#include "itolp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace itolp {

namespace {

void require_mass(double total_mass)
{
    if (!std::isfinite(total_mass) || total_mass < 0.0) {
        throw ConfigError("mark space: total mass lambda must be finite and >= 0, got " +
                          std::to_string(total_mass));
    }
}

}  // namespace

MarkSpace MarkSpace::finite_set(std::vector<double> values, std::vector<double> masses)
{
    if (values.empty() || values.size() != masses.size()) {
        throw ConfigError("mark space: finite set needs matching non-empty values and masses");
    }
    for (double m : masses) {
        if (!std::isfinite(m) || m < 0.0) throw ConfigError("mark space: masses must be >= 0");
    }
    MarkSpace ms;
    ms.kind_ = Kind::finite_set;
    ms.dim_ = 1;
    ms.values_ = std::move(values);
    ms.masses_ = std::move(masses);
    ms.total_mass_ = std::accumulate(ms.masses_.begin(), ms.masses_.end(), 0.0);
    require_mass(ms.total_mass_);
    ms.build_nodes(0);
    return ms;
}

MarkSpace MarkSpace::finite_uniform(std::size_t size, double total_mass)
{
    require_mass(total_mass);
    if (size == 0) throw ConfigError("mark space: finite set size must be positive");
    std::vector<double> values(size);
    std::iota(values.begin(), values.end(), 0.0);
    std::vector<double> masses(size, total_mass / static_cast<double>(size));
    auto ms = finite_set(std::move(values), std::move(masses));
    ms.total_mass_ = total_mass;
    return ms;
}

MarkSpace MarkSpace::box(std::vector<double> lower, std::vector<double> upper,
                         double total_mass, std::size_t resolution)
{
    require_mass(total_mass);
    if (lower.empty() || lower.size() != upper.size() || lower.size() > kMaxMarkDim) {
        throw ConfigError("mark space: box needs 1.." + std::to_string(kMaxMarkDim) +
                          " matching bounds");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i])) throw ConfigError("mark space: box bounds must satisfy lower < upper");
    }
    if (resolution == 0) throw ConfigError("mark space: box resolution must be positive");
    MarkSpace ms;
    ms.kind_ = Kind::box;
    ms.dim_ = lower.size();
    ms.lower_ = std::move(lower);
    ms.upper_ = std::move(upper);
    ms.total_mass_ = total_mass;
    ms.build_nodes(resolution);
    return ms;
}

void MarkSpace::build_nodes(std::size_t resolution)
{
    nodes_.clear();
    weights_.clear();
    if (kind_ == Kind::finite_set) {
        for (std::size_t j = 0; j < values_.size(); ++j) {
            Mark z;
            z.coords[0] = values_[j];
            z.dim = 1;
            z.index = j;
            nodes_.push_back(z);
            weights_.push_back(masses_[j]);
        }
        if (total_mass_ > 0.0) {
            law_ = std::discrete_distribution<std::size_t>::param_type(masses_.begin(), masses_.end());
        }
        return;
    }

    std::size_t count = 1;
    for (std::size_t i = 0; i < dim_; ++i) count *= resolution;
    const double w = total_mass_ / static_cast<double>(count);
    for (std::size_t flat = 0; flat < count; ++flat) {
        Mark z;
        z.dim = dim_;
        z.index = flat;
        std::size_t rem = flat;
        for (std::size_t i = 0; i < dim_; ++i) {
            const std::size_t j = rem % resolution;
            rem /= resolution;
            const double h = (upper_[i] - lower_[i]) / static_cast<double>(resolution);
            z.coords[i] = lower_[i] + (static_cast<double>(j) + 0.5) * h;
        }
        nodes_.push_back(z);
        weights_.push_back(w);
    }
}

MarkSpace MarkSpace::with_total_mass(double total_mass) const
{
    require_mass(total_mass);
    MarkSpace ms = *this;
    if (kind_ == Kind::finite_set) {
        const double scale = total_mass_ > 0.0 ? total_mass / total_mass_ : 0.0;
        if (total_mass_ > 0.0) {
            for (auto& m : ms.masses_) m *= scale;
        } else {
            ms.masses_.assign(ms.masses_.size(), total_mass / static_cast<double>(ms.masses_.size()));
        }
        ms.total_mass_ = total_mass;
        ms.build_nodes(0);
        return ms;
    }
    ms.total_mass_ = total_mass;
    const double w = total_mass / static_cast<double>(ms.nodes_.size());
    ms.weights_.assign(ms.nodes_.size(), w);
    return ms;
}

Mark MarkSpace::sample(Engine& rng) const
{
    Mark z;
    if (kind_ == Kind::finite_set) {
        std::size_t j = 0;
        if (values_.size() > 1) {
            std::discrete_distribution<std::size_t> law;
            j = law(rng, law_);
        }
        z.coords[0] = values_[j];
        z.dim = 1;
        z.index = j;
        return z;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    z.dim = dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
        z.coords[i] = lower_[i] + (upper_[i] - lower_[i]) * unit(rng);
    }
    return z;
}

void MarkSpace::integrate(const std::function<void(const Mark&, std::span<double>)>& fn,
                          std::span<double> scratch, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        fn(nodes_[j], scratch);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights_[j] * scratch[i];
    }
}

double MarkSpace::mass_of(const std::function<bool(const Mark&)>& subset) const
{
    return integrate([&](const Mark& z) { return subset(z) ? 1.0 : 0.0; });
}

}  // namespace itolp
