#pragma once

#include <cstdio>
#include <string>

namespace repomech {

// All human-facing numeric output uses fixed 9 decimal places so runs diff
// cleanly byte for byte.
inline std::string fmt9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", x);
    return buf;
}

}  // namespace repomech
