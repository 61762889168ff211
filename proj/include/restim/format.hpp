#pragma once

// Shortest round-trip decimal formatting for CSV output, so that repeated
// runs diff cleanly and parsed values reproduce the original bits.

#include <charconv>
#include <string>

namespace restim {

inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace restim
