// kernels.hpp — arithmetic inner-loop kernels: scalar reference + SIMD variants
//
// Every kernel has a scalar reference implementation that *defines* its
// semantics and, on x86-64, an AVX2 variant that must produce bitwise
// identical results (enforced by tests/kernels_test.cpp). The active backend
// is selected once at startup from CPU capabilities; the environment
// variable BRDS_KERNELS=scalar|avx2 overrides the choice.
//
// Bitwise reproducibility rules the design:
//  - f64 reductions use four striped partial sums (element j accumulates
//    into stripe j mod 4 via fused multiply-add) and a fixed final
//    combine (s0+s1)+(s2+s3). One AVX2 register holds the four stripes.
//  - fixed-point kernels are elementwise or group-wise with exact integer
//    semantics, so lane order never matters.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace brds::kernels {

struct KernelTable {
    // sum_j a[j]*b[j], striped-4 FMA order
    double (*dot_f64)(const double* a, const double* b, std::size_t m);
    // sum_j vals[j]*v[idx[j]], same striping
    double (*dot_gather_f64)(const double* vals, const std::int32_t* idx,
                             const double* v, std::size_t k);
    // y[i] += a*x[i]
    void (*axpy_f64)(double* y, double a, const double* x, std::size_t m);
    // sum_j x[j]^2, striped-4
    double (*nrm2sq_f64)(const double* x, std::size_t m);
    // out[i] = clamp((int64(a[i]) * b[i]) >> shift, lo, hi)
    // (arithmetic shift: truncation toward -inf, then saturation)
    void (*fx_mul_recover_i32)(const std::int32_t* a, const std::int32_t* b,
                               std::int32_t* out, std::size_t m,
                               int shift, std::int32_t lo, std::int32_t hi);
    // One level of the 3-ary saturating reduction tree:
    // groups of three consecutive inputs -> clamp(wide 3-sum); a trailing
    // pair -> clamp(wide 2-sum); a trailing single passes through.
    // Returns the number of outputs written. in != out allowed to alias
    // front-to-back (out <= in).
    std::size_t (*fx_add3_level_i32)(const std::int32_t* in, std::size_t m,
                                     std::int32_t* out,
                                     std::int32_t lo, std::int32_t hi);
    const char* name;
};

// Reference implementation; always available.
const KernelTable& scalar_table();

#if defined(__x86_64__) || defined(_M_X64)
// AVX2 implementation; call only when cpu_has_avx2() is true.
const KernelTable& avx2_table();
bool cpu_has_avx2();
#endif

// Active backend (env override > best available > scalar).
const KernelTable& active();

// Force a backend by name ("scalar", "avx2"); throws ConfigError on an
// unknown or unsupported name. Intended for tests.
void set_backend(const std::string& name);

inline double dot_f64(const double* a, const double* b, std::size_t m) {
    return active().dot_f64(a, b, m);
}
inline double dot_gather_f64(const double* vals, const std::int32_t* idx,
                             const double* v, std::size_t k) {
    return active().dot_gather_f64(vals, idx, v, k);
}
inline void axpy_f64(double* y, double a, const double* x, std::size_t m) {
    active().axpy_f64(y, a, x, m);
}
inline double nrm2sq_f64(const double* x, std::size_t m) {
    return active().nrm2sq_f64(x, m);
}
inline void fx_mul_recover_i32(const std::int32_t* a, const std::int32_t* b,
                               std::int32_t* out, std::size_t m,
                               int shift, std::int32_t lo, std::int32_t hi) {
    active().fx_mul_recover_i32(a, b, out, m, shift, lo, hi);
}
inline std::size_t fx_add3_level_i32(const std::int32_t* in, std::size_t m,
                                     std::int32_t* out,
                                     std::int32_t lo, std::int32_t hi) {
    return active().fx_add3_level_i32(in, m, out, lo, hi);
}

} // namespace brds::kernels
