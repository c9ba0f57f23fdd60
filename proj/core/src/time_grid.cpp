#include "itolp/time_grid.hpp"

#include "itolp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace itolp {

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_steps)
{
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        throw ConfigError("time grid: horizon T must be finite and positive, got " +
                          std::to_string(horizon));
    }
    if (n_steps == 0) throw ConfigError("time grid: n_steps must be positive");

    TimeGrid g;
    g.horizon_ = horizon;
    g.base_steps_ = n_steps;
    g.points_.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        g.points_[k] = horizon * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    g.points_.back() = horizon;
    g.event_index_.assign(g.points_.size(), -1);
    return g;
}

TimeGrid TimeGrid::with_events(std::span<const double> times) const
{
    TimeGrid g;
    g.horizon_ = horizon_;
    g.base_steps_ = base_steps_;
    g.points_.reserve(points_.size() + times.size());
    g.event_index_.reserve(points_.size() + times.size());
    g.event_points_.resize(times.size());

    std::size_t i = 0;  // existing points
    std::size_t e = 0;  // events
    double last = -1.0;
    while (i < points_.size() || e < times.size()) {
        const bool take_event = e < times.size() &&
                                (i >= points_.size() || times[e] <= points_[i]);
        if (take_event) {
            const double t = times[e];
            if (!(t > 0.0 && t <= horizon_)) {
                throw DomainError("time grid: event time " + std::to_string(t) +
                                  " outside (0, T]");
            }
            if (t <= last) {
                throw PreconditionError("time grid: event times must be strictly increasing");
            }
            g.points_.push_back(t);
            g.event_index_.push_back(static_cast<std::int64_t>(e));
            g.event_points_[e] = g.points_.size() - 1;
            last = t;
            ++e;
            if (i < points_.size() && points_[i] == t) ++i;  // merged onto existing point
        } else {
            const double t = points_[i];
            if (t != last) {
                g.points_.push_back(t);
                g.event_index_.push_back(-1);
                last = t;
            }
            ++i;
        }
    }
    return g;
}

std::optional<std::size_t> TimeGrid::event_at(std::size_t k) const noexcept
{
    if (event_index_[k] < 0) return std::nullopt;
    return static_cast<std::size_t>(event_index_[k]);
}

std::size_t TimeGrid::index_of(double t) const
{
    const double tol = 1e-12 * horizon_;
    if (!(t >= -tol && t <= horizon_ + tol)) {
        throw DomainError("time " + std::to_string(t) + " outside [0, T]");
    }
    auto it = std::lower_bound(points_.begin(), points_.end(), t - tol);
    if (it == points_.end() || std::abs(*it - t) > tol) {
        throw DomainError("time " + std::to_string(t) + " is not a grid point");
    }
    return static_cast<std::size_t>(it - points_.begin());
}

bool TimeGrid::refines(const TimeGrid& coarse) const
{
    return std::includes(points_.begin(), points_.end(), coarse.points_.begin(),
                         coarse.points_.end());
}

}  // namespace itolp
