#include <doctest.h>

#include <random>
#include <sstream>

#include "brds/pruning.hpp"

using namespace brds;
using namespace brds::pruning;

TEST_CASE("prune_row_balanced") {
    SUBCASE("keeps the two largest magnitudes") {
        Mat w(1, 4);
        w.at(0, 0) = 0.5; w.at(0, 1) = -0.1; w.at(0, 2) = 0.3; w.at(0, 3) = -0.7;
        const auto p = prune_row_balanced(w, 50.0);
        CHECK(p.k == 2);
        CHECK(p.w.at(0, 0) == 0.5);
        CHECK(p.w.at(0, 1) == 0.0);
        CHECK(p.w.at(0, 2) == 0.0);
        CHECK(p.w.at(0, 3) == -0.7);
        CHECK(p.mask.at(0, 0) == 1);
        CHECK(p.mask.at(0, 3) == 1);
    }

    SUBCASE("spar=0 keeps everything") {
        Mat w(2, 3);
        for (std::size_t i = 0; i < w.d.size(); ++i) w.d[i] = static_cast<double>(i) + 1;
        const auto p = prune_row_balanced(w, 0.0);
        CHECK(p.k == 3);
        CHECK(p.w == w);
        for (auto m : p.mask.d) CHECK(m == 1);
    }

    SUBCASE("spar=100 zeroes everything") {
        Mat w(2, 3);
        for (auto& v : w.d) v = 1.0;
        const auto p = prune_row_balanced(w, 100.0);
        CHECK(p.k == 0);
        for (auto v : p.w.d) CHECK(v == 0.0);
        for (auto m : p.mask.d) CHECK(m == 0);
    }

    SUBCASE("ties keep the lower column") {
        Mat w(1, 4);
        w.at(0, 0) = 0.5; w.at(0, 1) = -0.5; w.at(0, 2) = 0.5; w.at(0, 3) = 0.1;
        const auto p = prune_row_balanced(w, 50.0);
        CHECK(p.mask.at(0, 0) == 1);
        CHECK(p.mask.at(0, 1) == 1);
        CHECK(p.mask.at(0, 2) == 0);
        CHECK(p.mask.at(0, 3) == 0);
    }

    SUBCASE("keep-count formula") {
        CHECK(keep_count(153, 87.5) == 20);   // X_SP of the speech config
        CHECK(keep_count(1024, 87.5) == 128);
        CHECK(keep_count(10, 0.0) == 10);
        CHECK(keep_count(10, 100.0) == 0);
        CHECK(keep_count(4, 50.0) == 2);
    }

    SUBCASE("row balance across random cases") {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 300; ++trial) {
            const int rows = 1 + static_cast<int>(randint(rng, 8));
            const int cols = 1 + static_cast<int>(randint(rng, 24));
            Mat w(rows, cols);
            for (auto& v : w.d) v = uniform(rng, -1.0, 1.0);
            const double spar = uniform(rng, 0.0, 100.0);
            const auto p = prune_row_balanced(w, spar);
            CHECK(p.k == keep_count(cols, spar));
            for (int r = 0; r < rows; ++r) {
                int nz = 0, kept = 0;
                for (int c = 0; c < cols; ++c) {
                    nz += p.w.at(r, c) != 0.0 ? 1 : 0;
                    kept += p.mask.at(r, c);
                }
                CHECK(kept == p.k);
                CHECK(nz <= p.k);  // kept values are nonzero unless source was zero
            }
        }
    }
}

TEST_CASE("apply_dual_prune") {
    std::mt19937_64 rng(5);
    lstm::LstmParams params = lstm::LstmParams::zeros({153, 8});
    for (int g = 0; g < 4; ++g) {
        for (auto& v : params.w_x[g].d) v = uniform(rng, -1.0, 1.0);
        for (auto& v : params.w_h[g].d) v = uniform(rng, -1.0, 1.0);
    }

    const auto r = apply_dual_prune(params, 87.5, 50.0);
    CHECK(r.k_x == 20);  // 153 - floor(0.875*153)
    CHECK(r.k_h == 4);
    for (int g = 0; g < 4; ++g) {
        for (int row = 0; row < 8; ++row) {
            int kept = 0;
            for (int c = 0; c < 153; ++c) kept += r.masks.x[g].at(row, c);
            CHECK(kept == 20);
        }
    }

    // determinism
    const auto r2 = apply_dual_prune(params, 87.5, 50.0);
    for (int g = 0; g < 4; ++g) {
        CHECK(r2.masks.x[g].d == r.masks.x[g].d);
        CHECK(r2.params.w_x[g] == r.params.w_x[g]);
    }

    // equal ratios reduce to uniform pruning
    const auto u = apply_dual_prune(params, 60.0, 60.0);
    for (int g = 0; g < 4; ++g) {
        const auto px = prune_row_balanced(params.w_x[g], 60.0);
        CHECK(u.params.w_x[g] == px.w);
    }
}

TEST_CASE("estimate_search_time") {
    const SparsityConfig cfg{60.0, 10.0, 5.0, 5.0};
    const auto e = estimate_search_time(cfg, 2.0, 3);
    CHECK(e.ex1 == doctest::Approx(36.0));
    CHECK(e.ex2 == doctest::Approx(48.0));
    CHECK(e.ex3 == doctest::Approx(48.0));
    CHECK(e.ex_tot == doctest::Approx(132.0));

    // single ramp step; min rule with huge deltas
    const SparsityConfig one{60.0, 60.0, 1000.0, 1000.0};
    const auto e1 = estimate_search_time(one, 1.0, 1);
    CHECK(e1.ex1 == doctest::Approx(1.0));
    CHECK(e1.ex2 == doctest::Approx(std::min(40.0 / 1000.0, 60.0 / 1000.0)));
    CHECK(e1.ex3 == e1.ex2);  // symmetric deltas

    CHECK_THROWS_AS(estimate_search_time(cfg, 0.0, 3), ConfigError);
    CHECK_THROWS_AS(estimate_search_time(SparsityConfig{0.0, 1, 1, 1}, 1.0, 1), ConfigError);
}

namespace {

// Stub model for exercising the search driver: records its prune lineage.
struct StubModel {
    std::vector<std::pair<double, double>> history;
};

struct StubHooks {
    PruneFn<StubModel> prune = [](const StubModel& m, double sx, double sh) {
        StubModel next = m;
        next.history.emplace_back(sx, sh);
        pruning::DualMasks masks;
        for (int g = 0; g < 4; ++g) {
            masks.x[g] = lstm::Mask(1, 1, 1);
            masks.h[g] = lstm::Mask(1, 1, 1);
        }
        return std::make_pair(next, masks);
    };
    RetrainFn<StubModel> retrain = [](const StubModel& m, const pruning::DualMasks&) {
        return m;
    };
};

} // namespace

TEST_CASE("brds_search driver") {
    StubHooks hooks;

    SUBCASE("constant evaluate returns the initial uniform point") {
        const SparsityConfig cfg{60.0, 20.0, 10.0, 10.0};
        EvalFn<StubModel> ev = [](const StubModel&) { return EvalRecord{1.0, 0.5}; };
        const auto res = brds_search<StubModel>(StubModel{}, cfg, hooks.prune, hooks.retrain, ev);
        CHECK(res.spar_x == 60.0);
        CHECK(res.spar_h == 60.0);
        CHECK(res.best.score == 0.5);
        CHECK(static_cast<int>(res.trace.size()) == candidate_count(cfg));
    }

    SUBCASE("candidate count matches the loop-bound formula") {
        const SparsityConfig cfgs[] = {
            {60.0, 10.0, 5.0, 5.0},    // 1 + 8 + 8
            {60.0, 20.0, 10.0, 10.0},  // 1 + 4 + 4
            {60.0, 10.0, 7.0, 30.0},   // fractional quotients
            {87.5, 12.5, 12.5, 12.5},
            {50.0, 50.0, 60.0, 60.0},  // deltas larger than range
            {30.0, 7.0, 13.0, 11.0},
        };
        for (const auto& cfg : cfgs) {
            EvalFn<StubModel> ev = [](const StubModel&) { return EvalRecord{0.0, 0.0}; };
            const auto res =
                brds_search<StubModel>(StubModel{}, cfg, hooks.prune, hooks.retrain, ev);
            CAPTURE(cfg.os);
            CAPTURE(cfg.delta_x);
            CAPTURE(cfg.delta_h);
            CHECK(static_cast<int>(res.trace.size()) == candidate_count(cfg));
        }
        CHECK(candidate_count(SparsityConfig{60.0, 10.0, 5.0, 5.0}) == 17);
        CHECK(candidate_count(SparsityConfig{60.0, 10.0, 7.0, 30.0}) == 4);
        CHECK(candidate_count(SparsityConfig{50.0, 50.0, 60.0, 60.0}) == 1);
    }

    SUBCASE("each iteration prunes the previous iteration's network") {
        const SparsityConfig cfg{40.0, 20.0, 20.0, 20.0};
        // ramp: (20,20),(40,40); phase 2: (60,20),(80,0); phase 3: (20,60),(0,80)
        std::vector<StubModel> seen;
        EvalFn<StubModel> ev = [&](const StubModel& m) {
            seen.push_back(m);
            return EvalRecord{0.0, 0.0};
        };
        const auto res =
            brds_search<StubModel>(StubModel{}, cfg, hooks.prune, hooks.retrain, ev);
        REQUIRE(static_cast<int>(res.trace.size()) == candidate_count(cfg));
        REQUIRE(seen.size() == res.trace.size());

        const std::vector<std::pair<double, double>> ramp = {{20, 20}, {40, 40}};
        // candidate 0 = NN_p,i
        CHECK(seen[0].history == ramp);
        // phase 2 chains from NN_p,i
        std::vector<std::pair<double, double>> want = ramp;
        want.emplace_back(60, 20);
        CHECK(seen[1].history == want);
        want.emplace_back(80, 0);
        CHECK(seen[2].history == want);
        // phase 3 reloads NN_p,i
        want = ramp;
        want.emplace_back(20, 60);
        CHECK(seen[3].history == want);
        want.emplace_back(0, 80);
        CHECK(seen[4].history == want);

        // phases recorded in the trace
        CHECK(res.trace[0].phase == 1);
        CHECK(res.trace[1].phase == 2);
        CHECK(res.trace[3].phase == 3);
        CHECK(res.trace[2].spar_x == 80.0);
        CHECK(res.trace[2].spar_h == 0.0);
    }

    SUBCASE("non-finite accuracy is discarded with a warning") {
        const SparsityConfig cfg{60.0, 20.0, 20.0, 20.0};
        int calls = 0;
        EvalFn<StubModel> ev = [&](const StubModel&) {
            ++calls;
            if (calls > 1) return EvalRecord{1e9, std::nan("")};
            return EvalRecord{1.0, -1.0};
        };
        std::ostringstream warn;
        const auto res =
            brds_search<StubModel>(StubModel{}, cfg, hooks.prune, hooks.retrain, ev, &warn);
        CHECK(res.spar_x == 60.0);
        CHECK(res.best.score == -1.0);
        CHECK(warn.str().find("non-finite") != std::string::npos);
    }

    SUBCASE("best candidate wins and is reported with its ratios") {
        const SparsityConfig cfg{60.0, 20.0, 10.0, 10.0};
        EvalFn<StubModel> ev = [](const StubModel& m) {
            // favor the phase-3 point (40, 80)
            const auto& last = m.history.back();
            const double score = (last.first == 40.0 && last.second == 80.0) ? 9.0 : 1.0;
            return EvalRecord{-score, score};
        };
        const auto res =
            brds_search<StubModel>(StubModel{}, cfg, hooks.prune, hooks.retrain, ev);
        CHECK(res.spar_x == 40.0);
        CHECK(res.spar_h == 80.0);
        CHECK(res.best.score == 9.0);
    }
}

TEST_CASE("dual_ratio_sweep") {
    StubHooks hooks;
    EvalFn<StubModel> ev = [](const StubModel& m) {
        return EvalRecord{m.history.back().first, -m.history.back().first};
    };

    SUBCASE("single point grid still contains the uniform point") {
        const auto pts = dual_ratio_sweep<StubModel>(StubModel{}, 65.0, {{70.0, 60.0}},
                                                     hooks.prune, hooks.retrain, ev);
        REQUIRE(pts.size() == 2);
        CHECK(pts[1].spar_x == 65.0);
        CHECK(pts[1].spar_h == 65.0);
    }

    SUBCASE("uniform point not duplicated") {
        const auto pts = dual_ratio_sweep<StubModel>(StubModel{}, 65.0, {{65.0, 65.0}},
                                                     hooks.prune, hooks.retrain, ev);
        CHECK(pts.size() == 1);
    }

    SUBCASE("empty grid rejected") {
        CHECK_THROWS_AS(dual_ratio_sweep<StubModel>(StubModel{}, 65.0, {}, hooks.prune,
                                                    hooks.retrain, ev),
                        ConfigError);
    }
}

TEST_CASE("trace csv") {
    std::vector<TraceRow> rows = {{0, 1, 60, 60, 0.5, 1.0, 0.1}};
    std::ostringstream ss;
    write_trace_csv(rows, ss);
    CHECK(ss.str() == "iteration,phase,spar_x,spar_h,accuracy,loss,wall_s\n"
                      "0,1,60,60,0.5,1,0.1\n");
}
