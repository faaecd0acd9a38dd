// pruning.hpp — row-balanced pruning and the dual-ratio search.
//
// prune_row_balanced keeps, per row, the k = cols - floor(spar/100 * cols)
// entries of largest magnitude (ties keep the lower column), so every row
// of a pruned matrix stores exactly k nonzeros.
//
// brds_search ramps both ratios to the overall target OS (retraining after
// every pruning step), saves that network as the initial point, then sweeps
// (Spar_x += dx, Spar_h -= dh) and the opposite direction from the saved
// network, pruning the previous iteration's retrained weights each step.
// The initial uniform point is candidate 0, so the search never returns a
// tuple worse than uniform pruning. Candidates total
//   1 + floor(min((100-OS)/dx, OS/dh)) + floor(min((100-OS)/dh, OS/dx)),
// matching the cost-model loop bounds; a step that would overshoot a
// boundary ends the sweep (exact landings on 0/100 are evaluated).
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

#include "brds/lstm.hpp"

namespace brds::pruning {

struct SparsityConfig {
    double os = 60.0;       // overall sparsity target, percent
    double alpha = 10.0;    // ramp step
    double delta_x = 5.0;   // sweep step for Spar_x
    double delta_h = 5.0;   // sweep step for Spar_h

    void validate() const {
        config_check(os > 0.0 && os < 100.0, "SparsityConfig: OS must be in (0,100)");
        config_check(alpha > 0.0 && delta_x > 0.0 && delta_h > 0.0,
                     "SparsityConfig: steps must be positive");
    }
};

// keep-count for a sparsity percentage
inline int keep_count(int cols, double spar) {
    config_check(spar >= 0.0 && spar <= 100.0, "sparsity must be in [0,100]");
    return cols - static_cast<int>(std::floor(spar * static_cast<double>(cols) / 100.0));
}

struct PrunedMat {
    Mat w;
    lstm::Mask mask;
    int k = 0;
};

PrunedMat prune_row_balanced(const Mat& w, double spar);

struct DualMasks {
    std::array<lstm::Mask, 4> x;
    std::array<lstm::Mask, 4> h;
};

struct DualPruneResult {
    lstm::LstmParams params;
    DualMasks masks;
    int k_x = 0;  // X_SP
    int k_h = 0;  // H_SP
};

DualPruneResult apply_dual_prune(const lstm::LstmParams& params, double spar_x,
                                 double spar_h);

// --------------------------------------------------------------------------
// Search cost model
// --------------------------------------------------------------------------

struct SearchCostEstimate {
    double ex1 = 0, ex2 = 0, ex3 = 0, ex_tot = 0;
    double ept = 0;
    int n_re = 0;
};

SearchCostEstimate estimate_search_time(const SparsityConfig& cfg, double ept, int n_re);

// evaluated candidates: initial point + both sweep loops
int candidate_count(const SparsityConfig& cfg);

// --------------------------------------------------------------------------
// Search driver
// --------------------------------------------------------------------------

struct EvalRecord {
    double loss = 0.0;
    double score = 0.0;  // higher is better
};

struct TraceRow {
    int iteration = 0;
    int phase = 0;  // 1 = initial point, 2/3 = sweep directions
    double spar_x = 0.0;
    double spar_h = 0.0;
    double accuracy = 0.0;  // score
    double loss = 0.0;
    double wall_s = 0.0;
};

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& os);

template <class ModelT>
struct SearchResult {
    double spar_x = 0.0;
    double spar_h = 0.0;
    EvalRecord best;
    ModelT model;
    DualMasks masks;
    std::vector<TraceRow> trace;
};

// Hooks: prune(model, sx, sh) -> (pruned model, masks); retrain(model,
// masks) -> model with masked weights still exactly zero; evaluate(model)
// -> EvalRecord. Non-finite scores discard the candidate.
template <class ModelT>
using PruneFn = std::function<std::pair<ModelT, DualMasks>(const ModelT&, double, double)>;
template <class ModelT>
using RetrainFn = std::function<ModelT(const ModelT&, const DualMasks&)>;
template <class ModelT>
using EvalFn = std::function<EvalRecord(const ModelT&)>;

namespace detail {
inline constexpr double kEps = 1e-7;
}

template <class ModelT>
SearchResult<ModelT> brds_search(const ModelT& pretrained, const SparsityConfig& cfg,
                                 const PruneFn<ModelT>& prune,
                                 const RetrainFn<ModelT>& retrain,
                                 const EvalFn<ModelT>& evaluate,
                                 std::ostream* warnings = nullptr) {
    cfg.validate();
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto wall = [&] {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    SearchResult<ModelT> result;
    int iteration = 0;

    // Phase 1: ramp both ratios to OS with step alpha, retraining each step.
    ModelT model = pretrained;
    DualMasks masks;
    double ramp = 0.0;
    while (ramp < cfg.os - detail::kEps) {
        ramp = std::min(ramp + cfg.alpha, cfg.os);
        auto [pruned, m] = prune(model, ramp, ramp);
        masks = m;
        model = retrain(pruned, masks);
    }
    const ModelT initial_net = model;  // NN_p,i
    const DualMasks initial_masks = masks;

    // Candidate 0: the uniform point itself.
    result.best = evaluate(model);
    result.spar_x = cfg.os;
    result.spar_h = cfg.os;
    result.model = model;
    result.masks = masks;
    result.trace.push_back(
        {iteration++, 1, cfg.os, cfg.os, result.best.score, result.best.loss, wall()});

    const auto sweep = [&](int phase, double step_x, double step_h) {
        double sx = cfg.os, sh = cfg.os;
        ModelT cur = initial_net;
        while (true) {
            const double nx = sx + step_x;
            const double nh = sh + step_h;
            if (nx > 100.0 + detail::kEps || nx < -detail::kEps ||
                nh > 100.0 + detail::kEps || nh < -detail::kEps)
                break;
            sx = std::clamp(nx, 0.0, 100.0);
            sh = std::clamp(nh, 0.0, 100.0);
            auto [pruned, m] = prune(cur, sx, sh);
            cur = retrain(pruned, m);
            const EvalRecord rec = evaluate(cur);
            if (std::isfinite(rec.score)) {
                if (rec.score > result.best.score) {
                    result.best = rec;
                    result.spar_x = sx;
                    result.spar_h = sh;
                    result.model = cur;
                    result.masks = m;
                }
            } else if (warnings) {
                *warnings << "warning: non-finite accuracy at (" << sx << "," << sh
                          << "); candidate discarded\n";
            }
            result.trace.push_back({iteration++, phase, sx, sh, rec.score, rec.loss, wall()});
            if (sx >= 100.0 - detail::kEps || sx <= detail::kEps ||
                sh >= 100.0 - detail::kEps || sh <= detail::kEps)
                break;
        }
    };

    sweep(2, cfg.delta_x, -cfg.delta_h);   // Spar_x up, Spar_h down
    sweep(3, -cfg.delta_x, cfg.delta_h);   // opposite direction
    return result;
}

// --------------------------------------------------------------------------
// Dual-ratio sweep harness (independent points from one base model)
// --------------------------------------------------------------------------

struct SweepPoint {
    double spar_x = 0.0;
    double spar_h = 0.0;
    EvalRecord record;
};

template <class ModelT>
std::vector<SweepPoint> dual_ratio_sweep(const ModelT& base, double os,
                                         std::vector<std::pair<double, double>> grid,
                                         const PruneFn<ModelT>& prune,
                                         const RetrainFn<ModelT>& retrain,
                                         const EvalFn<ModelT>& evaluate) {
    config_check(!grid.empty(), "dual_ratio_sweep: empty grid");
    bool has_uniform = false;
    for (const auto& [sx, sh] : grid)
        if (std::abs(sx - os) < detail::kEps && std::abs(sh - os) < detail::kEps)
            has_uniform = true;
    if (!has_uniform) grid.emplace_back(os, os);

    std::vector<SweepPoint> out;
    out.reserve(grid.size());
    for (const auto& [sx, sh] : grid) {
        auto [pruned, masks] = prune(base, sx, sh);
        const ModelT tuned = retrain(pruned, masks);
        out.push_back({sx, sh, evaluate(tuned)});
    }
    return out;
}

void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& os);

} // namespace brds::pruning
