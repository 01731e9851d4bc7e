#pragma once

#include <cstdio>
#include <string>

#include <complex>

namespace billiards {

// fixed 17-significant-digit format so reports are diffable
inline std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string g17(const std::complex<double>& v) {
    return g17(v.real()) + (v.imag() < 0 ? "" : "+") + g17(v.imag()) + "i";
}

inline std::string fixed_px(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace billiards
