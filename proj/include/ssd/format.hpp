#pragma once

#include <charconv>
#include <string>

namespace ssd {

// Locale-independent float formatting: 6 significant digits, '.' decimal
// separator. Used for every float that lands in a CSV.
inline std::string fmt_g6(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

}  // namespace ssd
