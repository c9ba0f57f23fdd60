#pragma once

#include <cstdint>
#include <random>

namespace itolp {

using Engine = std::mt19937_64;

/// Independent sub-streams of one Monte-Carlo path.
enum class Stream : std::uint64_t {
    jumps = 1,
    wiener = 2,
    coefficients = 3,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the engine owned by (path, stream):
///
///     seed = splitmix64(splitmix64(master ^ (0x9E3779B97F4A7C15 * tag)) + path)
///
/// where tag is the numeric value of `stream` and all arithmetic is modulo 2^64.
/// The engine is std::mt19937_64 constructed from that single 64-bit value.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t path, Stream stream) noexcept;

Engine make_engine(std::uint64_t master, std::uint64_t path, Stream stream);

}  // namespace itolp
