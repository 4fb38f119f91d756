#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace xts {

// Data problems (bad files, invariant violations on input).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (divergence, degenerate statistics).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Usage / configuration problems.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic uniform draw on [lo, hi) from a raw 64-bit state.
// std::uniform_real_distribution is implementation-defined, so the mapping
// is done by hand to keep artifacts reproducible across toolchains.
double uniform_from_bits(std::uint64_t bits, double lo, double hi);

// FNV-1a, used for config/artifact fingerprints (not cryptographic).
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 14695981039346656037ULL);

// Shortest lossless decimal for a double (round-trips via strtod).
std::string format_double(double v);

}  // namespace xts
