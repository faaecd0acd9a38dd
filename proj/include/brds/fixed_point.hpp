// fixed_point.hpp — n-bit two's-complement fixed-point arithmetic.
//
// Every add/multiply truncates to n bits and passes a Recovery stage that
// saturates instead of wrapping:
//  - multiply: exact 2n-bit product, fractional bits dropped by arithmetic
//    right shift (truncation toward -inf), then saturation,
//  - add: exact wide sum, then one saturation; the three-input variant
//    saturates once on the wide 3-way sum.
//
// Dot products reduce through a left-to-right tree of three-input
// saturating adders. The leaf list is the *stored* operand set: sparse
// rows contribute their stored entries, dense rows their nonzero entries.
// lstm_core, sparse_format, and accel_model all reduce through
// fixed_dot()/fixed_tree_reduce() below, so their results are bitwise
// interchangeable. Saturation makes the order observable; do not reorder.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "brds/common.hpp"
#include "brds/kernels.hpp"

namespace brds::numerics {

struct FixedSpec {
    int width_bits = 16;  // n, total bits incl. sign
    int frac_bits = 12;   // f

    void validate() const {
        config_check(width_bits >= 2 && width_bits <= 32,
                     "FixedSpec: width_bits must be in [2,32]");
        config_check(frac_bits >= 0 && frac_bits < width_bits,
                     "FixedSpec: frac_bits must be in [0,width_bits)");
    }
    std::int32_t raw_min() const {
        return static_cast<std::int32_t>(-(std::int64_t(1) << (width_bits - 1)));
    }
    std::int32_t raw_max() const {
        return static_cast<std::int32_t>((std::int64_t(1) << (width_bits - 1)) - 1);
    }
    double scale() const { return std::ldexp(1.0, frac_bits); }  // 2^f

    bool operator==(const FixedSpec&) const = default;
};

struct Fixed {
    std::int32_t raw = 0;
    FixedSpec spec;

    double to_double() const { return std::ldexp(static_cast<double>(raw), -spec.frac_bits); }
};

inline std::int32_t saturate_raw(std::int64_t wide, const FixedSpec& spec) {
    const std::int64_t hi = spec.raw_max();
    const std::int64_t lo = spec.raw_min();
    if (wide > hi) return static_cast<std::int32_t>(hi);
    if (wide < lo) return static_cast<std::int32_t>(lo);
    return static_cast<std::int32_t>(wide);
}

// Round to nearest (ties to even), then saturate.
inline std::int32_t quantize_raw(double x, const FixedSpec& spec) {
    if (std::isnan(x)) return 0;
    const double scaled = std::ldexp(x, spec.frac_bits);
    if (scaled >= 0x1.0p62) return spec.raw_max();
    if (scaled <= -0x1.0p62) return spec.raw_min();
    return saturate_raw(std::llrint(scaled), spec);
}

inline Fixed quantize(double x, const FixedSpec& spec) {
    spec.validate();
    return Fixed{quantize_raw(x, spec), spec};
}

inline std::int32_t raw_mul(std::int32_t a, std::int32_t b, const FixedSpec& spec) {
    std::int64_t p = static_cast<std::int64_t>(a) * b;
    p >>= spec.frac_bits;
    return saturate_raw(p, spec);
}

inline std::int32_t raw_add(std::int32_t a, std::int32_t b, const FixedSpec& spec) {
    return saturate_raw(static_cast<std::int64_t>(a) + b, spec);
}

inline std::int32_t raw_add3(std::int32_t a, std::int32_t b, std::int32_t c,
                             const FixedSpec& spec) {
    return saturate_raw(static_cast<std::int64_t>(a) + b + c, spec);
}

inline void require_same_spec(const Fixed& a, const Fixed& b) {
    config_check(a.spec == b.spec, "fixed-point spec mismatch");
}

inline Fixed fx_mul(const Fixed& a, const Fixed& b) {
    require_same_spec(a, b);
    return Fixed{raw_mul(a.raw, b.raw, a.spec), a.spec};
}

inline Fixed fx_add(const Fixed& a, const Fixed& b) {
    require_same_spec(a, b);
    return Fixed{raw_add(a.raw, b.raw, a.spec), a.spec};
}

inline Fixed fx_add3(const Fixed& a, const Fixed& b, const Fixed& c) {
    require_same_spec(a, b);
    require_same_spec(b, c);
    return Fixed{raw_add3(a.raw, b.raw, c.raw, a.spec), a.spec};
}

// In-place tree reduction of `m` products. Consumes `buf[0..m)` as scratch.
inline std::int32_t fixed_tree_reduce(std::int32_t* buf, std::size_t m,
                                      const FixedSpec& spec) {
    if (m == 0) return 0;
    const std::int32_t lo = spec.raw_min();
    const std::int32_t hi = spec.raw_max();
    while (m > 1)
        m = kernels::fx_add3_level_i32(buf, m, buf, lo, hi);
    return buf[0];
}

// Dot product of k stored weights against gathered vector elements:
// products through the multiply Recovery, then the 3-ary adder tree.
// `scratch` is reused across calls to avoid reallocation.
inline std::int32_t fixed_dot(const std::int32_t* weights,
                              const std::int32_t* operands, std::size_t k,
                              const FixedSpec& spec,
                              std::vector<std::int32_t>& scratch) {
    if (k == 0) return 0;
    scratch.resize(k);
    kernels::fx_mul_recover_i32(weights, operands, scratch.data(), k,
                                spec.frac_bits, spec.raw_min(), spec.raw_max());
    return fixed_tree_reduce(scratch.data(), k, spec);
}

// Depth (in adder stages) of the 3-ary reduction tree over m leaves.
inline int tree_depth3(std::size_t m) {
    int depth = 0;
    while (m > 1) {
        std::size_t t = m / 3, rem = m % 3;
        m = t + (rem > 0 ? 1 : 0);
        ++depth;
    }
    return depth;
}

// Number of adder nodes (3-input or trailing 2-input) in that tree.
inline std::int64_t tree_adder_nodes3(std::size_t m) {
    std::int64_t nodes = 0;
    while (m > 1) {
        std::size_t t = m / 3, rem = m % 3;
        nodes += static_cast<std::int64_t>(t) + (rem == 2 ? 1 : 0);
        m = t + (rem > 0 ? 1 : 0);
    }
    return nodes;
}

} // namespace brds::numerics
