#pragma once

#include <charconv>
#include <string>

namespace itolp {

/// Shortest round-trip decimal form of v ('.' decimal separator, locale-free).
inline std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

}  // namespace itolp
