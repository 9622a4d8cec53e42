#pragma once

#include <cstdio>
#include <string>

namespace lrlab {

/// Shortest exact decimal form used everywhere a double is written to text
/// (CSV cells, provenance headers, reports): 17 significant digits round-trip.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace lrlab
