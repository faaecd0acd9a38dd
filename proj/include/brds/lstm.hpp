// lstm.hpp — dense LSTM layer: float reference and bit-accurate fixed paths.
//
// Gate order is f, i, g, o throughout (the bias-memory storage order).
// A step computes
//   f,i,o = sig(W_.x x + W_.h h + b_.)   g = tanh(W_gx x + W_gh h + b_g)
//   c' = f.c + i.g                        h' = o.tanh(c')
// The fixed path evaluates every multiply/add through the Recovery rules
// and reduces gate pre-activations with the shared 3-ary adder tree
// (see fixed_point.hpp); activations go through the PWL tables. Gate
// pre-activation combine order: (tree(Wx row) + tree(Wh row)) + bias.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "brds/fixed_point.hpp"
#include "brds/linalg.hpp"
#include "brds/pwl.hpp"

namespace brds::lstm {

struct LstmDims {
    int input = 1;   // X
    int hidden = 1;  // H

    void validate() const {
        config_check(input >= 1 && hidden >= 1, "LstmDims: sizes must be >= 1");
    }
    bool operator==(const LstmDims&) const = default;
};

inline constexpr int kGateF = 0;
inline constexpr int kGateI = 1;
inline constexpr int kGateG = 2;
inline constexpr int kGateO = 3;
inline constexpr const char* kGateNames[4] = {"f", "i", "g", "o"};

struct LstmParams {
    LstmDims dims;
    std::array<Mat, 4> w_x;  // H x X, gate order f,i,g,o
    std::array<Mat, 4> w_h;  // H x H
    std::array<Vec, 4> b;    // H

    static LstmParams zeros(const LstmDims& dims);
    void check_dims() const;
};

struct LstmState {
    Vec h, c;

    static LstmState zeros(int hidden) {
        return LstmState{Vec(hidden, 0.0), Vec(hidden, 0.0)};
    }
};

LstmState lstm_step_float(const LstmParams& params, const Vec& x, const LstmState& state);
std::vector<LstmState> lstm_run_float(const LstmParams& params,
                                      const std::vector<Vec>& inputs,
                                      const LstmState& init);

// --------------------------------------------------------------------------
// Fixed-point side
// --------------------------------------------------------------------------

// Kept-position mask; rows x cols, 1 = kept. An empty mask means "no
// pruning structure known": the kept set defaults to the nonzero entries.
struct Mask {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> d;

    Mask() = default;
    Mask(int r, int c, std::uint8_t fill = 1)
        : rows(r), cols(c), d(static_cast<std::size_t>(r) * c, fill) {}
    std::uint8_t at(int r, int c) const { return d[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t& at(int r, int c) { return d[static_cast<std::size_t>(r) * cols + c]; }
    bool empty() const { return d.empty(); }
};

struct FixedMat {
    int rows = 0;
    int cols = 0;
    std::vector<std::int32_t> raw;
    Mask mask;  // may be empty

    FixedMat() = default;
    FixedMat(int r, int c) : rows(r), cols(c), raw(static_cast<std::size_t>(r) * c, 0) {}
    std::int32_t at(int r, int c) const { return raw[static_cast<std::size_t>(r) * cols + c]; }
    std::int32_t& at(int r, int c) { return raw[static_cast<std::size_t>(r) * cols + c]; }
    const std::int32_t* row(int r) const { return raw.data() + static_cast<std::size_t>(r) * cols; }
    bool kept(int r, int c) const { return mask.empty() ? at(r, c) != 0 : mask.at(r, c) != 0; }
};

using FixedVec = std::vector<std::int32_t>;

struct FixedLstmParams {
    LstmDims dims;
    numerics::FixedSpec spec;
    std::array<FixedMat, 4> w_x;
    std::array<FixedMat, 4> w_h;
    std::array<FixedVec, 4> b;
};

struct FixedLstmState {
    FixedVec h, c;

    static FixedLstmState zeros(int hidden) {
        return FixedLstmState{FixedVec(hidden, 0), FixedVec(hidden, 0)};
    }
};

// Quantize float params (round-to-nearest-even + saturate). Per-matrix
// masks, when given, carry the pruning structure into the fixed model so
// that kept-but-rounded-to-zero weights stay part of the reduction.
FixedLstmParams quantize_params(const LstmParams& params, const numerics::FixedSpec& spec,
                                const std::array<Mask, 4>* masks_x = nullptr,
                                const std::array<Mask, 4>* masks_h = nullptr);

FixedVec quantize_vec(const Vec& v, const numerics::FixedSpec& spec);
Vec dequantize_vec(const FixedVec& v, const numerics::FixedSpec& spec);

FixedLstmState lstm_step_fixed(const FixedLstmParams& params, const FixedVec& x,
                               const FixedLstmState& state,
                               const numerics::PwlTable& sig,
                               const numerics::PwlTable& tanh_tbl);
std::vector<FixedLstmState> lstm_run_fixed(const FixedLstmParams& params,
                                           const std::vector<FixedVec>& inputs,
                                           const FixedLstmState& init,
                                           const numerics::PwlTable& sig,
                                           const numerics::PwlTable& tanh_tbl);

// Dense fixed matvec: leaves are the kept entries of each row, reduced by
// the shared tree. No bias.
FixedVec fixed_mxv(const FixedMat& w, const FixedVec& v, const numerics::FixedSpec& spec);

} // namespace brds::lstm
