#include "xts/common.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace xts {

double uniform_from_bits(std::uint64_t bits, double lo, double hi) {
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0,1)
    return lo + u * (hi - lo);
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
    return fnv1a(s.data(), s.size(), seed);
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace xts
