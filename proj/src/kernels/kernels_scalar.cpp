// Scalar reference kernels. These define the numeric semantics; the SIMD
// backends must match them bit for bit.

#include "brds/kernels.hpp"

#include <cmath>

namespace brds::kernels {
namespace {

double dot_f64_scalar(const double* a, const double* b, std::size_t m) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j)
        s[j & 3] = std::fma(a[j], b[j], s[j & 3]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_gather_f64_scalar(const double* vals, const std::int32_t* idx,
                             const double* v, std::size_t k) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < k; ++j)
        s[j & 3] = std::fma(vals[j], v[idx[j]], s[j & 3]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

void axpy_f64_scalar(double* y, double a, const double* x, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j)
        y[j] = std::fma(a, x[j], y[j]);
}

double nrm2sq_f64_scalar(const double* x, std::size_t m) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j)
        s[j & 3] = std::fma(x[j], x[j], s[j & 3]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

void fx_mul_recover_i32_scalar(const std::int32_t* a, const std::int32_t* b,
                               std::int32_t* out, std::size_t m,
                               int shift, std::int32_t lo, std::int32_t hi) {
    for (std::size_t j = 0; j < m; ++j) {
        std::int64_t p = static_cast<std::int64_t>(a[j]) * b[j];
        p >>= shift;  // arithmetic: rounds toward -inf
        if (p > hi) p = hi;
        if (p < lo) p = lo;
        out[j] = static_cast<std::int32_t>(p);
    }
}

std::size_t fx_add3_level_i32_scalar(const std::int32_t* in, std::size_t m,
                                     std::int32_t* out,
                                     std::int32_t lo, std::int32_t hi) {
    std::size_t o = 0;
    std::size_t j = 0;
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

const KernelTable& scalar_table() {
    static const KernelTable t = {
        dot_f64_scalar,
        dot_gather_f64_scalar,
        axpy_f64_scalar,
        nrm2sq_f64_scalar,
        fx_mul_recover_i32_scalar,
        fx_add3_level_i32_scalar,
        "scalar",
    };
    return t;
}

} // namespace brds::kernels
