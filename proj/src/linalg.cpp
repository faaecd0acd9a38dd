#include "brds/linalg.hpp"

namespace brds {
namespace {

thread_local std::vector<double> tl_vals;
thread_local std::vector<std::int32_t> tl_idx;

} // namespace

void mxv_into(const Mat& w, const Vec& v, Vec& out) {
    data_check(w.cols == static_cast<int>(v.size()), "mxv: dimension mismatch");
    out.resize(w.rows);
    for (int r = 0; r < w.rows; ++r) {
        const double* row = w.row(r);
        int nz = 0;
        for (int c = 0; c < w.cols; ++c)
            if (row[c] != 0.0) ++nz;
        if (nz == w.cols) {
            out[r] = kernels::dot_f64(row, v.data(), static_cast<std::size_t>(w.cols));
        } else {
            tl_vals.resize(nz);
            tl_idx.resize(nz);
            int j = 0;
            for (int c = 0; c < w.cols; ++c) {
                if (row[c] != 0.0) {
                    tl_vals[j] = row[c];
                    tl_idx[j] = c;
                    ++j;
                }
            }
            out[r] = kernels::dot_gather_f64(tl_vals.data(), tl_idx.data(), v.data(),
                                             static_cast<std::size_t>(nz));
        }
    }
}

Vec mxv(const Mat& w, const Vec& v) {
    Vec out;
    mxv_into(w, v, out);
    return out;
}

void tmv_acc(const Mat& w, const Vec& d, Vec& out) {
    data_check(w.rows == static_cast<int>(d.size()) &&
               w.cols == static_cast<int>(out.size()),
               "tmv_acc: dimension mismatch");
    for (int r = 0; r < w.rows; ++r)
        kernels::axpy_f64(out.data(), d[r], w.row(r), static_cast<std::size_t>(w.cols));
}

void outer_acc(Mat& g, const Vec& d, const Vec& x) {
    data_check(g.rows == static_cast<int>(d.size()) &&
               g.cols == static_cast<int>(x.size()),
               "outer_acc: dimension mismatch");
    for (int r = 0; r < g.rows; ++r)
        kernels::axpy_f64(g.row(r), d[r], x.data(), static_cast<std::size_t>(g.cols));
}

} // namespace brds
