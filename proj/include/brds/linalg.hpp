// linalg.hpp — minimal dense row-major matrix/vector helpers.
//
// Float reductions share one canonical order with the sparse path: the
// leaves of a row reduction are the row's *nonzero* entries in ascending
// column order, accumulated by the striped-4 FMA kernel. spmxv over an
// encoded matrix therefore reproduces mxv over the dense matrix exactly,
// including after pruning.
#pragma once

#include <cstdint>
#include <vector>

#include "brds/common.hpp"
#include "brds/kernels.hpp"

namespace brds {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> d;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), d(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return d[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return d[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return d.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return d.data() + static_cast<std::size_t>(r) * cols; }

    bool operator==(const Mat&) const = default;
};

// out[r] = sum over nonzero W[r][c] of W[r][c] * v[c]
void mxv_into(const Mat& w, const Vec& v, Vec& out);
Vec mxv(const Mat& w, const Vec& v);

// out[c] += sum_r W[r][c] * d[r]  (transpose matvec, accumulating)
void tmv_acc(const Mat& w, const Vec& d, Vec& out);

// G[r][c] += d[r] * x[c]
void outer_acc(Mat& g, const Vec& d, const Vec& x);

} // namespace brds
