// accel.hpp — functional + analytical model of the sparse LSTM accelerator.
//
// Datapath: two multiplier arrays (Small serves the weight set with fewer
// stored entries per row, Large the other; R_S/R_L is split to match the
// k-ratio so both finish a row together), Q parallel Gate/Buffer/Function
// module groups, a 3-input adder tree per Gate module, accumulate + bias
// add, PWL activations, and pointwise Function work overlapped with Gate
// work.
//
// The functional path reads the memory image row by row and reduces with
// the shared fixed-point pipeline, so its outputs are bitwise identical
// to lstm_step_fixed on the decoded model. The cycle model is analytical:
//   rows/module   = ceil(4H/Q)
//   cycles/row    = max(ceil(X_SP/(R_x/Q)), ceil(H_SP/(R_h/Q)), 1)
//   fill          = tree_depth3(ceil(R/Q)) + 3     (accumulate, bias, act)
//   drain         = 3                              (Function pipeline)
//   total         = rows/module * cycles/row + fill + drain
#pragma once

#include <cstdint>
#include <string>

#include "brds/memory_image.hpp"
#include "brds/pwl.hpp"

namespace brds::accel {

struct AccelConfig {
    lstm::LstmDims dims;
    int x_sp = 0;
    int h_sp = 0;
    int r_small = 1;   // R_S
    int r_large = 1;   // R_L
    int q = 1;         // Q parallel module groups
    int r_x = 1;       // multipliers serving W_x rows (R_S or R_L)
    int r_h = 1;
    numerics::FixedSpec spec;
    std::uint32_t w_addr = 8;
    double freq_mhz = 200.0;
    int pwl_segments = 64;
    double pwl_lo = -8.0;
    double pwl_hi = 8.0;

    int total_r() const { return r_small + r_large; }
};

// Splits R into R_S/R_L so R_S/R_L matches min(X_SP,H_SP)/max(X_SP,H_SP)
// (exact when achievable, nearest split otherwise) and assigns the Large
// MA to the weight set with more stored entries per row.
AccelConfig configure(const lstm::LstmDims& dims, int x_sp, int h_sp, int r, int q,
                      double freq_mhz, const numerics::FixedSpec& spec,
                      std::uint32_t w_addr = 8);

AccelConfig config_for_image(const sparse::MemoryImage& img, int r, int q, double freq_mhz);

struct CycleReport {
    std::int64_t cycles_per_timestep = 0;
    std::int64_t gate_cycles = 0;      // steady-state MA/tree work
    std::int64_t fill_cycles = 0;      // pipeline fill (tree + acc + bias + act)
    std::int64_t function_cycles = 0;  // Function-module drain
    double utilization_small = 0.0;
    double utilization_large = 0.0;
    std::int64_t ops_actual = 0;  // over stored nonzeros + pointwise work
    std::int64_t ops_dense = 0;   // same model without pruning
};

// Lower bound every simulation must satisfy.
std::int64_t cycle_lower_bound(const AccelConfig& cfg);

CycleReport analyze_cycles(const AccelConfig& cfg);

// Functional + cycle simulation of one time step (N=1 regime: weights
// resident in embedded memory).
struct StepResult {
    lstm::FixedLstmState state;
    CycleReport cycles;
};

StepResult simulate_timestep(const AccelConfig& cfg, const sparse::MemoryImage& img,
                             const lstm::FixedVec& x, const lstm::FixedLstmState& state);

// Repeated stepping without rebuilding activation tables.
class Simulator {
public:
    Simulator(AccelConfig cfg, const sparse::MemoryImage& img);
    StepResult step(const lstm::FixedVec& x, const lstm::FixedLstmState& state) const;
    const AccelConfig& config() const { return cfg_; }
    const numerics::PwlTable& sigmoid_table() const { return sig_; }
    const numerics::PwlTable& tanh_table() const { return tanh_; }

private:
    AccelConfig cfg_;
    const sparse::MemoryImage* img_;
    numerics::PwlTable sig_;
    numerics::PwlTable tanh_;
};

struct ResourceEstimate {
    std::int64_t dsp_count = 0;
    std::int64_t bram_count = 0;
    std::int64_t lut_estimate = 0;
    std::string formula_trace;
};

ResourceEstimate estimate_resources(const AccelConfig& cfg);

struct ThroughputReport {
    double gops = 0.0;
    double effective_gops = 0.0;
    double effective_per_dsp = 0.0;
    double effective_per_lut = 0.0;
    double sparsity = 0.0;
    // power is not modeled; reports emit "n/a" for GOPS/W
};

// sparsity in [0,1); cycles > 0. effective = gops / (1 - sparsity).
ThroughputReport throughput_report(const AccelConfig& cfg, double sparsity,
                                   std::int64_t cycles);

// fraction of weights pruned away relative to the dense model
double model_sparsity(const AccelConfig& cfg);

} // namespace brds::accel
