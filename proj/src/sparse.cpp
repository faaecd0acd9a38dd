#include "brds/sparse.hpp"

#include "brds/fixed_point.hpp"

namespace brds::sparse {
namespace {

// Column lists -> (values, rel) rows; shared by all encode overloads.
template <typename T, typename GetValue>
RowBalanced<T> encode_from_columns(int rows, int cols,
                                   const std::vector<std::vector<std::int32_t>>& row_cols,
                                   GetValue get) {
    int k = rows > 0 ? static_cast<int>(row_cols[0].size()) : 0;
    RowBalanced<T> s;
    s.rows = rows;
    s.cols = cols;
    s.k = k;
    s.values.reserve(static_cast<std::size_t>(rows) * k);
    s.rel.reserve(static_cast<std::size_t>(rows) * k);
    for (int r = 0; r < rows; ++r) {
        data_check(static_cast<int>(row_cols[r].size()) == k,
                   "encode_row_balanced: rows are not balanced");
        std::int32_t prev = -1;
        for (std::int32_t c : row_cols[r]) {
            const std::int32_t gap = c - prev - 1;
            data_check(gap >= 0 && gap <= 0xFFFF,
                       "encode_row_balanced: relative index out of range");
            s.values.push_back(get(r, c));
            s.rel.push_back(static_cast<std::uint16_t>(gap));
            prev = c;
        }
    }
    return s;
}

} // namespace

std::vector<std::int32_t> address_decode(const std::uint16_t* rel, int k) {
    std::vector<std::int32_t> cols(k);
    std::int32_t prev = -1;
    for (int j = 0; j < k; ++j) {
        prev = prev + static_cast<std::int32_t>(rel[j]) + 1;
        cols[j] = prev;
    }
    return cols;
}

RowBalancedF encode_row_balanced(const Mat& w) {
    std::vector<std::vector<std::int32_t>> row_cols(w.rows);
    for (int r = 0; r < w.rows; ++r)
        for (int c = 0; c < w.cols; ++c)
            if (w.at(r, c) != 0.0) row_cols[r].push_back(c);
    return encode_from_columns<double>(w.rows, w.cols, row_cols,
                                       [&](int r, int c) { return w.at(r, c); });
}

RowBalancedF encode_row_balanced(const Mat& w, const lstm::Mask& mask) {
    data_check(mask.rows == w.rows && mask.cols == w.cols,
               "encode_row_balanced: mask dimension mismatch");
    std::vector<std::vector<std::int32_t>> row_cols(w.rows);
    for (int r = 0; r < w.rows; ++r)
        for (int c = 0; c < w.cols; ++c)
            if (mask.at(r, c)) row_cols[r].push_back(c);
    return encode_from_columns<double>(w.rows, w.cols, row_cols,
                                       [&](int r, int c) { return w.at(r, c); });
}

RowBalancedQ encode_row_balanced(const lstm::FixedMat& w) {
    std::vector<std::vector<std::int32_t>> row_cols(w.rows);
    for (int r = 0; r < w.rows; ++r)
        for (int c = 0; c < w.cols; ++c)
            if (w.kept(r, c)) row_cols[r].push_back(c);
    return encode_from_columns<std::int32_t>(w.rows, w.cols, row_cols,
                                             [&](int r, int c) { return w.at(r, c); });
}

Mat decode(const RowBalancedF& s) {
    Mat w(s.rows, s.cols);
    for (int r = 0; r < s.rows; ++r) {
        const auto cols = address_decode(s.row_rel(r), s.k);
        for (int j = 0; j < s.k; ++j) {
            data_check(cols[j] < s.cols, "decode: column index out of range");
            w.at(r, cols[j]) = s.row_values(r)[j];
        }
    }
    return w;
}

lstm::FixedMat decode(const RowBalancedQ& s) {
    lstm::FixedMat w(s.rows, s.cols);
    w.mask = lstm::Mask(s.rows, s.cols, 0);
    for (int r = 0; r < s.rows; ++r) {
        const auto cols = address_decode(s.row_rel(r), s.k);
        for (int j = 0; j < s.k; ++j) {
            data_check(cols[j] < s.cols, "decode: column index out of range");
            w.at(r, cols[j]) = s.row_values(r)[j];
            w.mask.at(r, cols[j]) = 1;
        }
    }
    return w;
}

Vec spmxv(const RowBalancedF& s, const Vec& v) {
    data_check(s.cols == static_cast<int>(v.size()), "spmxv: dimension mismatch");
    Vec out(s.rows, 0.0);
    for (int r = 0; r < s.rows; ++r) {
        const auto cols = address_decode(s.row_rel(r), s.k);
        if (s.k > 0)
            data_check(cols.back() < s.cols, "spmxv: column index out of range");
        out[r] = kernels::dot_gather_f64(s.row_values(r), cols.data(), v.data(),
                                         static_cast<std::size_t>(s.k));
    }
    return out;
}

lstm::FixedVec spmxv(const RowBalancedQ& s, const lstm::FixedVec& v,
                     const numerics::FixedSpec& spec) {
    data_check(s.cols == static_cast<int>(v.size()), "spmxv: dimension mismatch");
    lstm::FixedVec out(s.rows, 0);
    std::vector<std::int32_t> operands, scratch;
    for (int r = 0; r < s.rows; ++r) {
        const auto cols = address_decode(s.row_rel(r), s.k);
        operands.resize(s.k);
        for (int j = 0; j < s.k; ++j) {
            data_check(cols[j] < s.cols, "spmxv: column index out of range");
            operands[j] = v[cols[j]];
        }
        out[r] = numerics::fixed_dot(s.row_values(r), operands.data(),
                                     static_cast<std::size_t>(s.k), spec, scratch);
    }
    return out;
}

} // namespace brds::sparse
