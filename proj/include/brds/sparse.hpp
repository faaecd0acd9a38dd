// sparse.hpp — row-balanced sparse matrices with relative column indices.
//
// Every row stores exactly k entries. rel[r][0] is the column of the first
// stored entry; rel[r][j] counts the zeros since the previous stored entry
// (absolute_col = prev_col + rel + 1). Cumulative (prefix-sum) decoding
// recovers absolute columns.
#pragma once

#include <cstdint>
#include <vector>

#include "brds/linalg.hpp"
#include "brds/lstm.hpp"

namespace brds::sparse {

template <typename T>
struct RowBalanced {
    int rows = 0;
    int cols = 0;
    int k = 0;  // stored entries per row
    std::vector<T> values;         // rows * k
    std::vector<std::uint16_t> rel;  // rows * k

    const T* row_values(int r) const { return values.data() + static_cast<std::size_t>(r) * k; }
    const std::uint16_t* row_rel(int r) const { return rel.data() + static_cast<std::size_t>(r) * k; }

    bool operator==(const RowBalanced&) const = default;
};

using RowBalancedF = RowBalanced<double>;
using RowBalancedQ = RowBalanced<std::int32_t>;

// Prefix-sum decode of one row of relative indices.
std::vector<std::int32_t> address_decode(const std::uint16_t* rel, int k);
inline std::vector<std::int32_t> address_decode(const std::vector<std::uint16_t>& rel) {
    return address_decode(rel.data(), static_cast<int>(rel.size()));
}

// Encode a dense matrix whose rows all carry the same number of stored
// entries. Without a mask the stored set is the nonzero entries; with a
// mask it is the kept positions (so kept weights that quantized to zero
// stay addressable). Throws DataError when rows are unbalanced.
RowBalancedF encode_row_balanced(const Mat& w);
RowBalancedF encode_row_balanced(const Mat& w, const lstm::Mask& mask);
RowBalancedQ encode_row_balanced(const lstm::FixedMat& w);

Mat decode(const RowBalancedF& s);
// Fixed decode keeps the stored positions as the mask.
lstm::FixedMat decode(const RowBalancedQ& s);

Vec spmxv(const RowBalancedF& s, const Vec& v);
lstm::FixedVec spmxv(const RowBalancedQ& s, const lstm::FixedVec& v,
                     const numerics::FixedSpec& spec);

} // namespace brds::sparse
