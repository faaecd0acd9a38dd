#include "brds/pruning.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace brds::pruning {

PrunedMat prune_row_balanced(const Mat& w, double spar) {
    const int k = keep_count(w.cols, spar);
    PrunedMat out;
    out.w = Mat(w.rows, w.cols);
    out.mask = lstm::Mask(w.rows, w.cols, 0);
    out.k = k;

    std::vector<int> order(w.cols);
    for (int r = 0; r < w.rows; ++r) {
        std::iota(order.begin(), order.end(), 0);
        // magnitude descending; ties keep the lower column index
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double ma = std::abs(w.at(r, a));
            const double mb = std::abs(w.at(r, b));
            if (ma != mb) return ma > mb;
            return a < b;
        });
        for (int j = 0; j < k; ++j) {
            const int c = order[j];
            out.w.at(r, c) = w.at(r, c);
            out.mask.at(r, c) = 1;
        }
    }
    return out;
}

DualPruneResult apply_dual_prune(const lstm::LstmParams& params, double spar_x,
                                 double spar_h) {
    params.check_dims();
    DualPruneResult out;
    out.params = params;
    for (int g = 0; g < 4; ++g) {
        auto px = prune_row_balanced(params.w_x[g], spar_x);
        out.params.w_x[g] = std::move(px.w);
        out.masks.x[g] = std::move(px.mask);
        out.k_x = px.k;
        auto ph = prune_row_balanced(params.w_h[g], spar_h);
        out.params.w_h[g] = std::move(ph.w);
        out.masks.h[g] = std::move(ph.mask);
        out.k_h = ph.k;
    }
    return out;
}

SearchCostEstimate estimate_search_time(const SparsityConfig& cfg, double ept, int n_re) {
    cfg.validate();
    config_check(ept > 0.0 && n_re > 0, "estimate_search_time: ept and n_re must be positive");
    SearchCostEstimate e;
    e.ept = ept;
    e.n_re = n_re;
    const double unit = ept * n_re;
    e.ex1 = cfg.os / cfg.alpha * unit;
    e.ex2 = std::min((100.0 - cfg.os) / cfg.delta_x, cfg.os / cfg.delta_h) * unit;
    e.ex3 = std::min((100.0 - cfg.os) / cfg.delta_h, cfg.os / cfg.delta_x) * unit;
    e.ex_tot = e.ex1 + e.ex2 + e.ex3;
    return e;
}

int candidate_count(const SparsityConfig& cfg) {
    cfg.validate();
    const auto steps = [](double range, double step) {
        return static_cast<int>(std::floor(range / step + detail::kEps));
    };
    const int n2 = std::min(steps(100.0 - cfg.os, cfg.delta_x), steps(cfg.os, cfg.delta_h));
    const int n3 = std::min(steps(100.0 - cfg.os, cfg.delta_h), steps(cfg.os, cfg.delta_x));
    return 1 + n2 + n3;
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& os) {
    os << "iteration,phase,spar_x,spar_h,accuracy,loss,wall_s\n";
    for (const auto& r : rows)
        os << r.iteration << ',' << r.phase << ',' << r.spar_x << ',' << r.spar_h << ','
           << r.accuracy << ',' << r.loss << ',' << r.wall_s << '\n';
}

void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& os) {
    os << "spar_x,spar_h,loss,score\n";
    for (const auto& p : points)
        os << p.spar_x << ',' << p.spar_h << ',' << p.record.loss << ','
           << p.record.score << '\n';
}

} // namespace brds::pruning
