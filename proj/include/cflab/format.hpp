#pragma once

#include <charconv>
#include <string>

namespace cflab {

// Shortest decimal string that round-trips the exact double value.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

}  // namespace cflab
