/// @file format.hpp
/// @brief Shortest decimal text that parses back to the same double.

#pragma once

#include <charconv>
#include <string>

namespace helivort {

inline std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace helivort
