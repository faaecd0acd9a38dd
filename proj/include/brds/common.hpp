// common.hpp — shared error types and small utilities
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace brds {

// Bad configuration: invalid specs, mismatched formats, out-of-range
// parameters. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad data: dimension mismatches, corrupt files, unbalanced matrices.
// CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void config_check(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

inline void data_check(bool ok, const std::string& msg) {
    if (!ok) throw DataError(msg);
}

// Deterministic uniform doubles on top of std::mt19937_64 raw output.
// std::uniform_real_distribution is implementation-defined; this is not.
template <class Engine>
double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

template <class Engine>
double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

template <class Engine>
std::uint64_t randint(Engine& eng, std::uint64_t n) {  // [0, n)
    return eng() % n;
}

} // namespace brds
