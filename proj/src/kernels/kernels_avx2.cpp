// AVX2 kernels. Compiled with -mavx2 -mfma; only reachable after the
// runtime capability check in dispatch.cpp. Each kernel reproduces the
// scalar reference bit for bit (see kernels_test.cpp):
//  - f64 reductions keep the four stripes in one ymm register, so lane l
//    accumulates exactly the elements j with j mod 4 == l, like scalar.
//  - fixed-point lanes are independent; only exact integer ops are used.

#include "brds/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace brds::kernels {
namespace {

inline double combine_stripes(__m256d acc) {
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_f64_avx2(const double* a, const double* b, std::size_t m) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc);
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; j < m; ++j)
        s[j & 3] = std::fma(a[j], b[j], s[j & 3]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_gather_f64_avx2(const double* vals, const std::int32_t* idx,
                           const double* v, std::size_t k) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= k; j += 4) {
        __m128i ix = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + j));
        __m256d g = _mm256_i32gather_pd(v, ix, 8);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + j), g, acc);
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; j < k; ++j)
        s[j & 3] = std::fma(vals[j], v[idx[j]], s[j & 3]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

void axpy_f64_avx2(double* y, double a, const double* x, std::size_t m) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j));
        _mm256_storeu_pd(y + j, r);
    }
    for (; j < m; ++j)
        y[j] = std::fma(a, x[j], y[j]);
}

double nrm2sq_f64_avx2(const double* x, std::size_t m) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        __m256d v = _mm256_loadu_pd(x + j);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    for (; j < m; ++j)
        s[j & 3] = std::fma(x[j], x[j], s[j & 3]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

// AVX2 has no 64-bit arithmetic right shift or 64-bit min/max; both are
// emulated (sign fill via compare, clamp via compare + blend).
inline __m256i sra_epi64(__m256i x, int s, __m256i high_fill_mask) {
    if (s == 0) return x;
    __m256i logical = _mm256_srli_epi64(x, s);
    __m256i sign = _mm256_cmpgt_epi64(_mm256_setzero_si256(), x);
    return _mm256_or_si256(logical, _mm256_and_si256(sign, high_fill_mask));
}

inline __m256i clamp_epi64(__m256i x, __m256i lov, __m256i hiv) {
    x = _mm256_blendv_epi8(x, hiv, _mm256_cmpgt_epi64(x, hiv));
    x = _mm256_blendv_epi8(x, lov, _mm256_cmpgt_epi64(lov, x));
    return x;
}

// low 32 bits of each 64-bit lane -> 4 packed int32 in the low xmm
inline __m128i pack_low32(__m256i x) {
    __m256i sh = _mm256_permutevar8x32_epi32(x, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0));
    return _mm256_castsi256_si128(sh);
}

void fx_mul_recover_i32_avx2(const std::int32_t* a, const std::int32_t* b,
                             std::int32_t* out, std::size_t m,
                             int shift, std::int32_t lo, std::int32_t hi) {
    const __m256i lov = _mm256_set1_epi64x(lo);
    const __m256i hiv = _mm256_set1_epi64x(hi);
    const __m256i fill = shift > 0
        ? _mm256_set1_epi64x(static_cast<long long>(~0ULL << (64 - shift)))
        : _mm256_setzero_si256();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        __m256i a64 = _mm256_cvtepi32_epi64(
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(a + j)));
        __m256i b64 = _mm256_cvtepi32_epi64(
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(b + j)));
        __m256i p = _mm256_mul_epi32(a64, b64);  // low-32 x low-32, signed
        p = clamp_epi64(sra_epi64(p, shift, fill), lov, hiv);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + j), pack_low32(p));
    }
    for (; j < m; ++j) {
        std::int64_t p = static_cast<std::int64_t>(a[j]) * b[j];
        p >>= shift;
        if (p > hi) p = hi;
        if (p < lo) p = lo;
        out[j] = static_cast<std::int32_t>(p);
    }
}

std::size_t fx_add3_level_i32_avx2(const std::int32_t* in, std::size_t m,
                                   std::int32_t* out,
                                   std::int32_t lo, std::int32_t hi) {
    const __m256i lov = _mm256_set1_epi64x(lo);
    const __m256i hiv = _mm256_set1_epi64x(hi);
    const __m128i stride = _mm_setr_epi32(0, 3, 6, 9);
    const std::size_t triples = m / 3;
    std::size_t g = 0;
    for (; g + 4 <= triples; g += 4) {
        const std::int32_t* base = in + 3 * g;
        __m256i x0 = _mm256_cvtepi32_epi64(_mm_i32gather_epi32(base, stride, 4));
        __m256i x1 = _mm256_cvtepi32_epi64(_mm_i32gather_epi32(base + 1, stride, 4));
        __m256i x2 = _mm256_cvtepi32_epi64(_mm_i32gather_epi32(base + 2, stride, 4));
        __m256i s = _mm256_add_epi64(_mm256_add_epi64(x0, x1), x2);
        s = clamp_epi64(s, lov, hiv);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + g), pack_low32(s));
    }
    std::size_t o = g;
    std::size_t j = 3 * g;
    for (; j + 3 <= m; j += 3) {
        std::int64_t s = static_cast<std::int64_t>(in[j]) + in[j + 1] + in[j + 2];
        if (s > hi) s = hi;
        if (s < lo) s = lo;
        out[o++] = static_cast<std::int32_t>(s);
    }
    if (m - j == 2) {
        std::int64_t s = static_cast<std::int64_t>(in[j]) + in[j + 1];
        if (s > hi) s = hi;
        if (s < lo) s = lo;
        out[o++] = static_cast<std::int32_t>(s);
    } else if (m - j == 1) {
        out[o++] = in[j];
    }
    return o;
}

} // namespace

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable& avx2_table() {
    static const KernelTable t = {
        dot_f64_avx2,
        dot_gather_f64_avx2,
        axpy_f64_avx2,
        nrm2sq_f64_avx2,
        fx_mul_recover_i32_avx2,
        fx_add3_level_i32_avx2,
        "avx2",
    };
    return t;
}

} // namespace brds::kernels

#endif // x86-64
