#include "brds/lstm.hpp"

#include <cmath>

namespace brds::lstm {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Gather the kept entries of one fixed row plus the matching operand
// elements, then run the shared multiply/tree-reduce pipeline.
struct RowScratch {
    std::vector<std::int32_t> w, o, prod;
};

std::int32_t fixed_row_dot(const FixedMat& m, int r, const FixedVec& v,
                           const numerics::FixedSpec& spec, RowScratch& s) {
    s.w.clear();
    s.o.clear();
    for (int c = 0; c < m.cols; ++c) {
        if (m.kept(r, c)) {
            s.w.push_back(m.at(r, c));
            s.o.push_back(v[c]);
        }
    }
    return numerics::fixed_dot(s.w.data(), s.o.data(), s.w.size(), spec, s.prod);
}

} // namespace

LstmParams LstmParams::zeros(const LstmDims& dims) {
    dims.validate();
    LstmParams p;
    p.dims = dims;
    for (int g = 0; g < 4; ++g) {
        p.w_x[g] = Mat(dims.hidden, dims.input);
        p.w_h[g] = Mat(dims.hidden, dims.hidden);
        p.b[g] = Vec(dims.hidden, 0.0);
    }
    return p;
}

void LstmParams::check_dims() const {
    dims.validate();
    for (int g = 0; g < 4; ++g) {
        data_check(w_x[g].rows == dims.hidden && w_x[g].cols == dims.input,
                   "LstmParams: W_x dimension mismatch");
        data_check(w_h[g].rows == dims.hidden && w_h[g].cols == dims.hidden,
                   "LstmParams: W_h dimension mismatch");
        data_check(static_cast<int>(b[g].size()) == dims.hidden,
                   "LstmParams: bias dimension mismatch");
    }
}

LstmState lstm_step_float(const LstmParams& params, const Vec& x, const LstmState& state) {
    const int H = params.dims.hidden;
    data_check(static_cast<int>(x.size()) == params.dims.input,
               "lstm_step_float: input size mismatch");
    data_check(static_cast<int>(state.h.size()) == H &&
               static_cast<int>(state.c.size()) == H,
               "lstm_step_float: state size mismatch");

    std::array<Vec, 4> pre;
    Vec tmp;
    for (int g = 0; g < 4; ++g) {
        mxv_into(params.w_x[g], x, pre[g]);
        mxv_into(params.w_h[g], state.h, tmp);
        for (int r = 0; r < H; ++r)
            pre[g][r] = (pre[g][r] + tmp[r]) + params.b[g][r];
    }

    LstmState out = LstmState::zeros(H);
    for (int r = 0; r < H; ++r) {
        const double f = sigmoid(pre[kGateF][r]);
        const double i = sigmoid(pre[kGateI][r]);
        const double gg = std::tanh(pre[kGateG][r]);
        const double o = sigmoid(pre[kGateO][r]);
        out.c[r] = f * state.c[r] + i * gg;
        out.h[r] = o * std::tanh(out.c[r]);
    }
    return out;
}

std::vector<LstmState> lstm_run_float(const LstmParams& params,
                                      const std::vector<Vec>& inputs,
                                      const LstmState& init) {
    std::vector<LstmState> traj;
    traj.reserve(inputs.size());
    const LstmState* prev = &init;
    for (const Vec& x : inputs) {
        traj.push_back(lstm_step_float(params, x, *prev));
        prev = &traj.back();
    }
    return traj;
}

FixedVec quantize_vec(const Vec& v, const numerics::FixedSpec& spec) {
    FixedVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = numerics::quantize_raw(v[i], spec);
    return out;
}

Vec dequantize_vec(const FixedVec& v, const numerics::FixedSpec& spec) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std::ldexp(static_cast<double>(v[i]), -spec.frac_bits);
    return out;
}

FixedLstmParams quantize_params(const LstmParams& params, const numerics::FixedSpec& spec,
                                const std::array<Mask, 4>* masks_x,
                                const std::array<Mask, 4>* masks_h) {
    spec.validate();
    params.check_dims();
    FixedLstmParams q;
    q.dims = params.dims;
    q.spec = spec;
    for (int g = 0; g < 4; ++g) {
        const auto quant_mat = [&](const Mat& src, const Mask* mask) {
            FixedMat dst(src.rows, src.cols);
            for (int r = 0; r < src.rows; ++r)
                for (int c = 0; c < src.cols; ++c)
                    dst.at(r, c) = numerics::quantize_raw(src.at(r, c), spec);
            if (mask) {
                data_check(mask->rows == src.rows && mask->cols == src.cols,
                           "quantize_params: mask dimension mismatch");
                dst.mask = *mask;
            }
            return dst;
        };
        q.w_x[g] = quant_mat(params.w_x[g], masks_x ? &(*masks_x)[g] : nullptr);
        q.w_h[g] = quant_mat(params.w_h[g], masks_h ? &(*masks_h)[g] : nullptr);
        q.b[g] = quantize_vec(params.b[g], spec);
    }
    return q;
}

FixedLstmState lstm_step_fixed(const FixedLstmParams& params, const FixedVec& x,
                               const FixedLstmState& state,
                               const numerics::PwlTable& sig,
                               const numerics::PwlTable& tanh_tbl) {
    const int H = params.dims.hidden;
    const numerics::FixedSpec& spec = params.spec;
    config_check(sig.spec == spec && tanh_tbl.spec == spec,
                 "lstm_step_fixed: PWL table spec mismatch");
    data_check(static_cast<int>(x.size()) == params.dims.input,
               "lstm_step_fixed: input size mismatch");
    data_check(static_cast<int>(state.h.size()) == H &&
               static_cast<int>(state.c.size()) == H,
               "lstm_step_fixed: state size mismatch");

    RowScratch scratch;
    std::array<FixedVec, 4> gate(
        {FixedVec(H), FixedVec(H), FixedVec(H), FixedVec(H)});
    for (int g = 0; g < 4; ++g) {
        const numerics::PwlTable& tbl = (g == kGateG) ? tanh_tbl : sig;
        for (int r = 0; r < H; ++r) {
            const std::int32_t sx = fixed_row_dot(params.w_x[g], r, x, spec, scratch);
            const std::int32_t sh = fixed_row_dot(params.w_h[g], r, state.h, spec, scratch);
            const std::int32_t pre =
                numerics::raw_add(numerics::raw_add(sx, sh, spec), params.b[g][r], spec);
            gate[g][r] = numerics::pwl_eval_raw(tbl, pre);
        }
    }

    FixedLstmState out = FixedLstmState::zeros(H);
    for (int r = 0; r < H; ++r) {
        const std::int32_t fc = numerics::raw_mul(gate[kGateF][r], state.c[r], spec);
        const std::int32_t ig = numerics::raw_mul(gate[kGateI][r], gate[kGateG][r], spec);
        out.c[r] = numerics::raw_add(fc, ig, spec);
        const std::int32_t tc = numerics::pwl_eval_raw(tanh_tbl, out.c[r]);
        out.h[r] = numerics::raw_mul(gate[kGateO][r], tc, spec);
    }
    return out;
}

std::vector<FixedLstmState> lstm_run_fixed(const FixedLstmParams& params,
                                           const std::vector<FixedVec>& inputs,
                                           const FixedLstmState& init,
                                           const numerics::PwlTable& sig,
                                           const numerics::PwlTable& tanh_tbl) {
    std::vector<FixedLstmState> traj;
    traj.reserve(inputs.size());
    const FixedLstmState* prev = &init;
    for (const FixedVec& x : inputs) {
        traj.push_back(lstm_step_fixed(params, x, *prev, sig, tanh_tbl));
        prev = &traj.back();
    }
    return traj;
}

FixedVec fixed_mxv(const FixedMat& w, const FixedVec& v, const numerics::FixedSpec& spec) {
    data_check(w.cols == static_cast<int>(v.size()), "fixed_mxv: dimension mismatch");
    RowScratch scratch;
    FixedVec out(w.rows);
    for (int r = 0; r < w.rows; ++r)
        out[r] = fixed_row_dot(w, r, v, spec, scratch);
    return out;
}

} // namespace brds::lstm
