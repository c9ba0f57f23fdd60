#include "itolp/jumps.hpp"

#include "itolp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace itolp {

namespace {

void check_time(const TimeGrid& grid, double t)
{
    if (!std::isfinite(t) || t < 0.0 || t > grid.horizon() * (1.0 + 1e-12)) {
        throw DomainError("jump integral: t = " + std::to_string(t) + " outside [0, T]");
    }
}

// Sorted times; an exact tie is broken by atom index and the later atom is
// moved to the next representable double so every atom owns a grid point.
void sort_atoms(std::vector<Atom>& atoms, double horizon)
{
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < atoms.size(); ++i) {
        if (atoms[i].time <= atoms[i - 1].time) {
            atoms[i].time = std::nextafter(atoms[i - 1].time, std::numeric_limits<double>::infinity());
        }
    }
    // Pushed past T: walk back from the end.
    for (std::size_t i = atoms.size(); i-- > 0;) {
        const double cap = i + 1 < atoms.size()
                               ? std::nextafter(atoms[i + 1].time, 0.0)
                               : horizon;
        if (atoms[i].time > cap) atoms[i].time = cap;
    }
}

}  // namespace

std::vector<double> JumpStream::times() const
{
    std::vector<double> t(atoms.size());
    std::transform(atoms.begin(), atoms.end(), t.begin(), [](const Atom& a) { return a.time; });
    return t;
}

JumpStream sample_jump_stream(const MarkSpace& marks, const TimeGrid& grid, Engine& rng)
{
    const double lambda = marks.total_mass();
    const double horizon = grid.horizon();
    if (!std::isfinite(lambda) || !std::isfinite(horizon)) {
        throw ConfigError("sample_jump_stream: lambda and T must be finite");
    }
    JumpStream js;
    if (lambda == 0.0) return js;

    std::poisson_distribution<long> count_law(lambda * horizon);
    const long n = count_law(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    js.atoms.resize(static_cast<std::size_t>(n));
    for (auto& atom : js.atoms) {
        atom.time = horizon * (1.0 - unit(rng));  // (0, T]
        atom.mark = marks.sample(rng);
    }
    sort_atoms(js.atoms, horizon);
    return js;
}

std::vector<JumpStream> sample_jump_ladder(const MarkSpace& marks,
                                           std::span<const double> masses,
                                           const TimeGrid& grid, Engine& rng)
{
    if (masses.empty()) return {};
    for (std::size_t n = 1; n < masses.size(); ++n) {
        if (!(masses[n] >= masses[n - 1])) {
            throw ConfigError("truncation ladder must be nondecreasing");
        }
    }
    const double top = masses.back();
    auto top_stream = sample_jump_stream(marks.with_total_mass(top), grid, rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> keep(top_stream.size());
    for (auto& u : keep) u = unit(rng);

    std::vector<JumpStream> ladder(masses.size());
    for (std::size_t n = 0; n < masses.size(); ++n) {
        ladder[n].truncation_level = static_cast<int>(n);
        const double ratio = top > 0.0 ? masses[n] / top : 0.0;
        for (std::size_t a = 0; a < top_stream.size(); ++a) {
            if (keep[a] < ratio || n + 1 == masses.size()) ladder[n].atoms.push_back(top_stream.atoms[a]);
        }
    }
    return ladder;
}

void require_augmented(const JumpStream& jumps, const TimeGrid& grid)
{
    if (jumps.size() != grid.n_events()) {
        throw PreconditionError("grid is not augmented with this jump stream");
    }
    for (std::size_t a = 0; a < jumps.size(); ++a) {
        if (grid[grid.point_of_event(a)] != jumps.atoms[a].time) {
            throw PreconditionError("grid is not augmented with this jump stream");
        }
    }
}

TimeGrid merge_jump_times(const TimeGrid& grid, const JumpStream& jumps)
{
    const auto t = jumps.times();
    return grid.with_events(t);
}

double compensator_integral(const MarkFunction& hfun, const MarkSpace& marks,
                            const TimeGrid& grid, double t)
{
    check_time(grid, t);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size() && grid[k] < t; ++k) {
        const double dt = std::min(grid[k + 1], t) - grid[k];
        const double tk = grid[k];
        total += dt * marks.integrate([&](const Mark& z) { return hfun(tk, z); });
    }
    return total;
}

double raw_jump_integral(const MarkFunction& hfun, const JumpStream& jumps, double t)
{
    double total = 0.0;
    for (const auto& atom : jumps.atoms) {
        if (atom.time > t) break;
        total += hfun(atom.time, atom.mark);
    }
    return total;
}

double compensated_jump_integral(const MarkFunction& hfun, const JumpStream& jumps,
                                 const MarkSpace& marks, const TimeGrid& grid, double t)
{
    check_time(grid, t);
    return raw_jump_integral(hfun, jumps, t) - compensator_integral(hfun, marks, grid, t);
}

}  // namespace itolp
