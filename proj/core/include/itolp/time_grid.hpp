#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace itolp {

/// Time discretisation of [0, T].
///
/// A grid starts uniform with `n_steps` steps. Event times (jump atoms) can be
/// merged in with `with_events`; each event then owns exactly one grid point,
/// reachable through `event_at`. Points are strictly increasing, points[0] = 0
/// and points.back() = T.
class TimeGrid {
public:
    static TimeGrid uniform(double horizon, std::size_t n_steps);

    /// Grid augmented by `times` (each in (0, T], strictly increasing).
    /// An event that falls exactly on an existing point is attached to it.
    TimeGrid with_events(std::span<const double> times) const;

    double horizon() const noexcept { return horizon_; }
    /// Number of uniform steps the grid was created with (before events).
    std::size_t base_steps() const noexcept { return base_steps_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::size_t n_steps() const noexcept { return points_.size() - 1; }
    std::span<const double> points() const noexcept { return points_; }
    double operator[](std::size_t k) const noexcept { return points_[k]; }
    double step(std::size_t k) const noexcept { return points_[k + 1] - points_[k]; }

    /// Index of the event (atom) sitting on point k, if any.
    std::optional<std::size_t> event_at(std::size_t k) const noexcept;
    std::size_t n_events() const noexcept { return event_points_.size(); }
    /// Grid index of event e.
    std::size_t point_of_event(std::size_t e) const noexcept { return event_points_[e]; }

    /// Grid index of time t. Throws DomainError when t is not a grid point
    /// (tolerance 1e-12 * T) or outside [0, T].
    std::size_t index_of(double t) const;

    /// True when every point of `coarse` is also a point of this grid.
    bool refines(const TimeGrid& coarse) const;

private:
    TimeGrid() = default;

    double horizon_ = 0.0;
    std::size_t base_steps_ = 0;
    std::vector<double> points_;
    std::vector<std::int64_t> event_index_;  // per point, -1 if none
    std::vector<std::size_t> event_points_;
};

}  // namespace itolp
