#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace yule {

// Appends the shortest decimal string that round-trips to the same double.
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

}  // namespace yule
