#pragma once

#include <cstdio>
#include <string>

namespace ccopt {

// Shortest round-trippable-enough decimal for tabular output; %.10g keeps
// CSV bytes stable across runs and platforms for the magnitudes used here.
inline std::string format_g(double v, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

} // namespace ccopt
