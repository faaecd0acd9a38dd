#include "brds/accel.hpp"

#include <cmath>
#include <sstream>

#include "brds/fixed_point.hpp"

namespace brds::accel {
namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

constexpr std::int64_t kBramBits = 36 * 1024;

} // namespace

AccelConfig configure(const lstm::LstmDims& dims, int x_sp, int h_sp, int r, int q,
                      double freq_mhz, const numerics::FixedSpec& spec,
                      std::uint32_t w_addr) {
    dims.validate();
    spec.validate();
    config_check(r >= 2, "configure: R must be >= 2");
    config_check(q >= 1 && q <= 4 * dims.hidden, "configure: Q must be in [1, 4H]");
    config_check(x_sp >= 0 && x_sp <= dims.input && h_sp >= 0 && h_sp <= dims.hidden,
                 "configure: stored-entry counts out of range");
    config_check(freq_mhz > 0.0, "configure: frequency must be positive");

    const int k_small = std::min(x_sp, h_sp);
    const int k_large = std::max(x_sp, h_sp);

    AccelConfig cfg;
    cfg.dims = dims;
    cfg.x_sp = x_sp;
    cfg.h_sp = h_sp;
    cfg.q = q;
    cfg.spec = spec;
    cfg.w_addr = w_addr;
    cfg.freq_mhz = freq_mhz;

    if (k_large == 0) {
        cfg.r_small = r / 2;  // degenerate: nothing stored, split evenly
        cfg.r_large = r - cfg.r_small;
    } else {
        // R_S/R_L = k_small/k_large, exact when achievable
        int r_s = static_cast<int>(std::llround(
            static_cast<double>(r) * k_small / (k_small + k_large)));
        r_s = std::max(1, std::min(r - 1, r_s));
        cfg.r_small = r_s;
        cfg.r_large = r - r_s;
    }
    config_check(cfg.r_small >= q && cfg.r_large >= q,
                 "configure: each Gate module needs at least one multiplier per MA "
                 "(R_S and R_L must be >= Q)");

    // Large MA serves the weight set with more stored entries per row.
    if (x_sp <= h_sp) {
        cfg.r_x = cfg.r_small;
        cfg.r_h = cfg.r_large;
    } else {
        cfg.r_x = cfg.r_large;
        cfg.r_h = cfg.r_small;
    }
    return cfg;
}

AccelConfig config_for_image(const sparse::MemoryImage& img, int r, int q, double freq_mhz) {
    return configure(lstm::LstmDims{static_cast<int>(img.geo.input),
                                    static_cast<int>(img.geo.hidden)},
                     static_cast<int>(img.geo.x_sp), static_cast<int>(img.geo.h_sp),
                     r, q, freq_mhz, img.geo.spec(), img.geo.w_addr);
}

std::int64_t cycle_lower_bound(const AccelConfig& cfg) {
    const std::int64_t rows_per_module = ceil_div(4ll * cfg.dims.hidden, cfg.q);
    const std::int64_t cx = cfg.x_sp > 0 ? ceil_div(static_cast<std::int64_t>(cfg.x_sp) * cfg.q, cfg.r_x) : 0;
    const std::int64_t ch = cfg.h_sp > 0 ? ceil_div(static_cast<std::int64_t>(cfg.h_sp) * cfg.q, cfg.r_h) : 0;
    return rows_per_module * std::max<std::int64_t>({cx, ch, 1});
}

namespace {

std::int64_t pointwise_ops(const AccelConfig& cfg) {
    const std::int64_t H = cfg.dims.hidden;
    // Function module: c' = f.c + i.g and h' = o.tanh(c') -> 2 mul + 1 add
    // + 1 tanh per hidden unit; 4 activation evaluations per row, each one
    // multiply-add in a DSP (2 ops).
    return 4 * H + 4 * H * 2;
}

} // namespace

CycleReport analyze_cycles(const AccelConfig& cfg) {
    CycleReport rep;
    const std::int64_t H = cfg.dims.hidden;
    const std::int64_t rows_per_module = ceil_div(4 * H, cfg.q);
    const std::int64_t cx =
        cfg.x_sp > 0 ? ceil_div(static_cast<std::int64_t>(cfg.x_sp) * cfg.q, cfg.r_x) : 0;
    const std::int64_t ch =
        cfg.h_sp > 0 ? ceil_div(static_cast<std::int64_t>(cfg.h_sp) * cfg.q, cfg.r_h) : 0;
    const std::int64_t cyc_row = std::max<std::int64_t>({cx, ch, 1});

    rep.gate_cycles = rows_per_module * cyc_row;
    rep.fill_cycles = numerics::tree_depth3(
                          static_cast<std::size_t>(ceil_div(cfg.total_r(), cfg.q))) + 3;
    rep.function_cycles = 3;
    rep.cycles_per_timestep = rep.gate_cycles + rep.fill_cycles + rep.function_cycles;

    const int k_small = std::min(cfg.x_sp, cfg.h_sp);
    const int k_large = std::max(cfg.x_sp, cfg.h_sp);
    rep.utilization_small =
        static_cast<double>(k_small) * cfg.q / (static_cast<double>(cyc_row) * cfg.r_small);
    rep.utilization_large =
        static_cast<double>(k_large) * cfg.q / (static_cast<double>(cyc_row) * cfg.r_large);

    rep.ops_actual = 8 * H * (cfg.x_sp + cfg.h_sp) + pointwise_ops(cfg);
    rep.ops_dense = 8 * H * (cfg.dims.input + H) + pointwise_ops(cfg);
    return rep;
}

StepResult simulate_timestep(const AccelConfig& cfg, const sparse::MemoryImage& img,
                             const lstm::FixedVec& x, const lstm::FixedLstmState& state) {
    return Simulator(cfg, img).step(x, state);
}

Simulator::Simulator(AccelConfig cfg, const sparse::MemoryImage& img)
    : cfg_(cfg), img_(&img) {
    config_check(static_cast<int>(img.geo.hidden) == cfg.dims.hidden &&
                 static_cast<int>(img.geo.input) == cfg.dims.input &&
                 static_cast<int>(img.geo.x_sp) == cfg.x_sp &&
                 static_cast<int>(img.geo.h_sp) == cfg.h_sp,
                 "simulator: image geometry does not match the configuration");
    config_check(img.geo.spec() == cfg.spec, "simulator: fixed-point spec mismatch");
    sig_ = numerics::build_pwl_table(numerics::ActKind::sigmoid, cfg.pwl_segments,
                                     cfg.pwl_lo, cfg.pwl_hi, cfg.spec);
    tanh_ = numerics::build_pwl_table(numerics::ActKind::tanh, cfg.pwl_segments,
                                      cfg.pwl_lo, cfg.pwl_hi, cfg.spec);
}

StepResult Simulator::step(const lstm::FixedVec& x, const lstm::FixedLstmState& state) const {
    const int H = cfg_.dims.hidden;
    const numerics::FixedSpec& spec = cfg_.spec;
    data_check(static_cast<int>(x.size()) == cfg_.dims.input,
               "simulate: input length mismatch");
    data_check(static_cast<int>(state.h.size()) == H &&
               static_cast<int>(state.c.size()) == H,
               "simulate: state length mismatch");

    StepResult out;
    out.state = lstm::FixedLstmState::zeros(H);
    out.cycles = analyze_cycles(cfg_);

    const auto biases = sparse::extract_biases(*img_);
    std::vector<std::int32_t> operands, scratch;
    std::array<lstm::FixedVec, 4> gate(
        {lstm::FixedVec(H), lstm::FixedVec(H), lstm::FixedVec(H), lstm::FixedVec(H)});

    for (int g = 0; g < 4; ++g) {
        const numerics::PwlTable& tbl = (g == lstm::kGateG) ? tanh_ : sig_;
        for (int r = 0; r < H; ++r) {
            // Small/Large MA work for one gate row, reduced by the shared tree.
            const auto rx = sparse::image_fetch_row(*img_, g, r, sparse::WeightSet::wx);
            operands.resize(rx.values.size());
            for (std::size_t j = 0; j < rx.cols.size(); ++j) operands[j] = x[rx.cols[j]];
            const std::int32_t sx = numerics::fixed_dot(
                rx.values.data(), operands.data(), rx.values.size(), spec, scratch);

            const auto rh = sparse::image_fetch_row(*img_, g, r, sparse::WeightSet::wh);
            operands.resize(rh.values.size());
            for (std::size_t j = 0; j < rh.cols.size(); ++j) operands[j] = state.h[rh.cols[j]];
            const std::int32_t sh = numerics::fixed_dot(
                rh.values.data(), operands.data(), rh.values.size(), spec, scratch);

            const std::int32_t pre = numerics::raw_add(
                numerics::raw_add(sx, sh, spec), biases[g][r], spec);
            gate[g][r] = numerics::pwl_eval_raw(tbl, pre);
        }
    }

    // Function module: pointwise state update
    for (int r = 0; r < H; ++r) {
        const std::int32_t fc = numerics::raw_mul(gate[lstm::kGateF][r], state.c[r], spec);
        const std::int32_t ig =
            numerics::raw_mul(gate[lstm::kGateI][r], gate[lstm::kGateG][r], spec);
        out.state.c[r] = numerics::raw_add(fc, ig, spec);
        const std::int32_t tc = numerics::pwl_eval_raw(tanh_, out.state.c[r]);
        out.state.h[r] = numerics::raw_mul(gate[lstm::kGateO][r], tc, spec);
    }
    return out;
}

ResourceEstimate estimate_resources(const AccelConfig& cfg) {
    ResourceEstimate est;
    const std::int64_t H = cfg.dims.hidden;
    const std::int64_t X = cfg.dims.input;
    const std::int64_t n = cfg.spec.width_bits;
    const std::int64_t r = cfg.total_r();
    const std::int64_t leaves = ceil_div(r, cfg.q);
    const std::int64_t tree = numerics::tree_adder_nodes3(static_cast<std::size_t>(leaves));

    // multipliers + per-module tree adders + accumulate/bias/activation/
    // pointwise DSPs (4 per module group)
    est.dsp_count = r + static_cast<std::int64_t>(cfg.q) * (tree + 4);

    const std::int64_t bits_wx = 4 * H * cfg.x_sp * n;
    const std::int64_t bits_wh = 4 * H * cfg.h_sp * n;
    const std::int64_t bits_adx = 4 * H * cfg.x_sp * cfg.w_addr;
    const std::int64_t bits_adh = 4 * H * cfg.h_sp * cfg.w_addr;
    const std::int64_t bits_b = 4 * H * n;
    const std::int64_t bits_c = H * n;
    const std::int64_t mx_copies = (cfg.r_x + 1) / 2;
    const std::int64_t mh_copies = (cfg.r_h + 1) / 2;
    const std::int64_t bram_wx = ceil_div(bits_wx, kBramBits);
    const std::int64_t bram_wh = ceil_div(bits_wh, kBramBits);
    const std::int64_t bram_adx = ceil_div(bits_adx, kBramBits);
    const std::int64_t bram_adh = ceil_div(bits_adh, kBramBits);
    const std::int64_t bram_b = ceil_div(bits_b, kBramBits);
    const std::int64_t bram_c = ceil_div(bits_c, kBramBits);
    const std::int64_t bram_x = mx_copies * std::max<std::int64_t>(1, ceil_div(X * n, kBramBits));
    const std::int64_t bram_h = mh_copies * std::max<std::int64_t>(1, ceil_div(H * n, kBramBits));
    est.bram_count = bram_wx + bram_wh + bram_adx + bram_adh + bram_b + bram_c + bram_x + bram_h;

    // rough logic estimate: address-decode prefix adders, recovery clamps,
    // fixed control overhead
    est.lut_estimate = static_cast<std::int64_t>(cfg.q) * (cfg.x_sp + cfg.h_sp) * cfg.w_addr +
                       r * n + 2000;

    std::ostringstream trace;
    trace << "dsp = R + Q*(tree_adders(ceil(R/Q)) + 4) = " << r << " + " << cfg.q << "*("
          << tree << " + 4) = " << est.dsp_count << "\n"
          << "bram(36Kb): M_WX " << bram_wx << " (" << bits_wx << "b), M_WH " << bram_wh
          << " (" << bits_wh << "b), M_AdX " << bram_adx << ", M_AdH " << bram_adh
          << ", M_B " << bram_b << ", M_C " << bram_c << ", M_X " << bram_x << " ("
          << mx_copies << " copies), M_H " << bram_h << " (" << mh_copies
          << " copies) = " << est.bram_count << "\n"
          << "lut = Q*(X_SP+H_SP)*w_addr + R*n + 2000 = " << est.lut_estimate << "\n"
          << "ops/timestep = 2*4H*(X_SP+H_SP) macs + 4H pointwise + 8H activation = "
          << 8 * H * (cfg.x_sp + cfg.h_sp) + 12 * H;
    est.formula_trace = trace.str();
    return est;
}

ThroughputReport throughput_report(const AccelConfig& cfg, double sparsity,
                                   std::int64_t cycles) {
    config_check(cycles > 0, "throughput_report: cycles must be positive");
    config_check(sparsity >= 0.0 && sparsity < 1.0,
                 "throughput_report: sparsity must be in [0,1)");
    const CycleReport rep = analyze_cycles(cfg);
    const ResourceEstimate res = estimate_resources(cfg);

    ThroughputReport t;
    t.sparsity = sparsity;
    const double seconds = static_cast<double>(cycles) / (cfg.freq_mhz * 1e6);
    t.gops = static_cast<double>(rep.ops_actual) / seconds / 1e9;
    t.effective_gops = t.gops / (1.0 - sparsity);
    t.effective_per_dsp = t.effective_gops / static_cast<double>(res.dsp_count);
    t.effective_per_lut = t.effective_gops / static_cast<double>(res.lut_estimate);
    return t;
}

double model_sparsity(const AccelConfig& cfg) {
    const double stored = 4.0 * cfg.dims.hidden * (cfg.x_sp + cfg.h_sp);
    const double dense = 4.0 * cfg.dims.hidden *
                         (static_cast<double>(cfg.dims.input) + cfg.dims.hidden);
    return 1.0 - stored / dense;
}

} // namespace brds::accel
