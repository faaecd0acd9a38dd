#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "brds/trainer.hpp"

using namespace brds;
using namespace brds::trainer;

namespace {

bool params_equal(const lstm::LstmParams& a, const lstm::LstmParams& b) {
    for (int g = 0; g < 4; ++g)
        if (!(a.w_x[g] == b.w_x[g] && a.w_h[g] == b.w_h[g] && a.b[g] == b.b[g]))
            return false;
    return true;
}

bool networks_equal(const Network& a, const Network& b) {
    return params_equal(a.lstm, b.lstm) && a.w_out == b.w_out && a.b_out == b.b_out;
}

pruning::DualMasks full_masks(const lstm::LstmDims& dims, std::uint8_t fill) {
    pruning::DualMasks m;
    for (int g = 0; g < 4; ++g) {
        m.x[g] = lstm::Mask(dims.hidden, dims.input, fill);
        m.h[g] = lstm::Mask(dims.hidden, dims.hidden, fill);
    }
    return m;
}

} // namespace

TEST_CASE("task generation") {
    SUBCASE("deterministic regeneration") {
        const auto a = generate_task(TaskKind::adding_problem, 0, {64, 16, 16, 0});
        const auto b = generate_task(TaskKind::adding_problem, 0, {64, 16, 16, 0});
        REQUIRE(a.train.size() == b.train.size());
        for (std::size_t e = 0; e < a.train.size(); ++e) {
            CHECK(a.train[e].inputs == b.train[e].inputs);
            CHECK(a.train[e].final_target == b.train[e].final_target);
        }
        const auto c = generate_task(TaskKind::adding_problem, 1, {64, 16, 16, 0});
        CHECK(a.train[0].inputs != c.train[0].inputs);
    }

    SUBCASE("adding targets equal the sum of the two marked values") {
        const auto t = generate_task(TaskKind::adding_problem, 3, {128, 8, 8, 0});
        CHECK(t.seq_len == 20);
        for (const auto& ex : t.train) {
            double sum = 0.0;
            int marks = 0;
            for (const auto& step : ex.inputs) {
                if (step[1] == 1.0) {
                    sum += step[0];
                    ++marks;
                }
            }
            CHECK(marks == 2);
            CHECK(ex.final_target[0] == doctest::Approx(sum).epsilon(1e-12));
        }
    }

    SUBCASE("parity targets in {0,1} and consistent with inputs") {
        const auto t = generate_task(TaskKind::sequence_parity, 9, {64, 8, 8, 0});
        CHECK(t.seq_len == 16);
        for (const auto& ex : t.train) {
            int ones = 0;
            for (const auto& step : ex.inputs) ones += step[0] > 0 ? 1 : 0;
            CHECK((ex.final_target[0] == 0.0 || ex.final_target[0] == 1.0));
            CHECK(ex.final_target[0] == static_cast<double>(ones & 1));
        }
    }

    SUBCASE("char_lm stream shapes") {
        const auto t = generate_task(TaskKind::char_lm, 4, {32, 8, 8, 0});
        CHECK(t.seq_len == 32);
        CHECK(t.input_dim == kCharLmVocab);
        for (const auto& ex : t.train) {
            REQUIRE(ex.step_targets.size() == 32);
            for (int s : ex.step_targets) {
                CHECK(s >= 0);
                CHECK(s < kCharLmVocab);
            }
        }
    }
}

TEST_CASE("gradient check against central differences") {
    // relative error <= 1e-4 across every parameter of a tiny instance
    const double h = 1e-5;
    const auto rel_err = [](double a, double b) {
        return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
    };

    const auto check_task = [&](TaskKind kind, std::uint64_t seed) {
        const auto task = generate_task(kind, seed, {4, 2, 2, 4});
        const lstm::LstmDims dims{task.input_dim, 3};
        Network net = init_network(dims, task.output_dim, seed + 1);

        std::vector<const Example*> batch;
        for (const auto& ex : task.train) batch.push_back(&ex);

        NetGrads grads = NetGrads::zeros(dims, task.output_dim);
        batch_loss_and_grads(net, task, batch, grads);

        double worst = 0.0;
        const auto fd_check = [&](double& param, double analytic) {
            const double keep = param;
            param = keep + h;
            const double lp = batch_loss(net, task, batch);
            param = keep - h;
            const double lm = batch_loss(net, task, batch);
            param = keep;
            const double fd = (lp - lm) / (2.0 * h);
            if (std::abs(fd) + std::abs(analytic) > 1e-7)
                worst = std::max(worst, rel_err(fd, analytic));
        };

        for (int g = 0; g < 4; ++g) {
            for (std::size_t i = 0; i < net.lstm.w_x[g].d.size(); ++i)
                fd_check(net.lstm.w_x[g].d[i], grads.w_x[g].d[i]);
            for (std::size_t i = 0; i < net.lstm.w_h[g].d.size(); ++i)
                fd_check(net.lstm.w_h[g].d[i], grads.w_h[g].d[i]);
            for (std::size_t i = 0; i < net.lstm.b[g].size(); ++i)
                fd_check(net.lstm.b[g][i], grads.b[g][i]);
        }
        for (std::size_t i = 0; i < net.w_out.d.size(); ++i)
            fd_check(net.w_out.d[i], grads.w_out.d[i]);
        for (std::size_t i = 0; i < net.b_out.size(); ++i)
            fd_check(net.b_out[i], grads.b_out[i]);

        CAPTURE(static_cast<int>(kind));
        MESSAGE("worst relative gradient error: ", worst);
        CHECK(worst <= 1e-4);
    };

    check_task(TaskKind::adding_problem, 11);
    check_task(TaskKind::sequence_parity, 12);
    check_task(TaskKind::char_lm, 13);
}

TEST_CASE("training mechanics") {
    const auto task = generate_task(TaskKind::adding_problem, 21, {64, 16, 16, 8});
    const lstm::LstmDims dims{2, 6};

    SUBCASE("zero epochs returns the initialization unchanged") {
        TrainConfig cfg;
        cfg.epochs = 0;
        cfg.seed = 5;
        const auto r = train(task, dims, cfg);
        CHECK(networks_equal(r.net, init_network(dims, 1, 5)));
        CHECK(r.log.empty());
    }

    SUBCASE("fixed seed reproduces bitwise") {
        TrainConfig cfg;
        cfg.epochs = 3;
        cfg.batch = 8;
        cfg.seed = 7;
        const auto a = train(task, dims, cfg);
        const auto b = train(task, dims, cfg);
        CHECK(networks_equal(a.net, b.net));
        for (std::size_t e = 0; e < a.log.size(); ++e) {
            CHECK(a.log[e].train_loss == b.log[e].train_loss);
            CHECK(a.log[e].val_metric == b.log[e].val_metric);
        }
    }

    SUBCASE("all-true mask equals plain continuation bitwise") {
        TrainConfig cfg;
        cfg.epochs = 2;
        cfg.batch = 8;
        cfg.seed = 3;
        const Network start = init_network(dims, 1, 9);
        const auto plain = train_network(start, task, cfg, nullptr);
        const auto masked = retrain_masked(start, full_masks(dims, 1), task, cfg);
        CHECK(networks_equal(plain.net, masked));
    }

    SUBCASE("all-false mask leaves every weight matrix unchanged") {
        // biases and readout are never pruned and keep training
        TrainConfig cfg;
        cfg.epochs = 2;
        cfg.batch = 8;
        const Network start = init_network(dims, 1, 9);
        const auto masked = retrain_masked(start, full_masks(dims, 0), task, cfg);
        for (int g = 0; g < 4; ++g) {
            CHECK(masked.lstm.w_x[g] == start.lstm.w_x[g]);
            CHECK(masked.lstm.w_h[g] == start.lstm.w_h[g]);
        }
    }

    SUBCASE("mask dimension mismatch rejected") {
        TrainConfig cfg;
        const Network start = init_network(dims, 1, 9);
        auto bad = full_masks({3, 7}, 1);
        CHECK_THROWS_AS(retrain_masked(start, bad, task, cfg), DataError);
    }

    SUBCASE("divergence raises a data error") {
        TrainConfig cfg;
        cfg.epochs = 1;
        cfg.batch = 8;
        Network start = init_network(dims, 1, 9);
        start.b_out[0] = std::nan("");
        CHECK_THROWS_AS(train_network(start, task, cfg, nullptr), DataError);
    }
}

TEST_CASE("masked positions stay exactly zero through retraining") {
    const auto task = generate_task(TaskKind::adding_problem, 31, {128, 32, 32, 0});
    const lstm::LstmDims dims{2, 8};
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch = 16;
    cfg.seed = 4;
    const auto base = train(task, dims, cfg);

    const auto pruned = pruning::apply_dual_prune(base.net.lstm, 50.0, 50.0);
    Network pnet = base.net;
    pnet.lstm = pruned.params;
    const Network tuned = retrain_masked(pnet, pruned.masks, task, cfg);

    int zero_checked = 0;
    for (int g = 0; g < 4; ++g) {
        for (int r = 0; r < dims.hidden; ++r) {
            for (int c = 0; c < dims.input; ++c)
                if (!pruned.masks.x[g].at(r, c)) {
                    CHECK(tuned.lstm.w_x[g].at(r, c) == 0.0);
                    ++zero_checked;
                }
            for (int c = 0; c < dims.hidden; ++c)
                if (!pruned.masks.h[g].at(r, c)) {
                    CHECK(tuned.lstm.w_h[g].at(r, c) == 0.0);
                    ++zero_checked;
                }
        }
    }
    CHECK(zero_checked > 0);
}

TEST_CASE("adding problem converges") {
    const auto task = generate_task(TaskKind::adding_problem, 42, {512, 128, 128, 0});
    TrainConfig cfg = default_config(TaskKind::adding_problem);
    cfg.seed = 1;
    const auto r = train(task, {2, 16}, cfg);

    // target variance baseline ~ 1/6; training must beat 0.05
    const auto ev = evaluate(r.net, task, Split::val);
    MESSAGE("adding-problem val mse after ", cfg.epochs, " epochs: ", ev.loss);
    CHECK(ev.loss < 0.05);

    // smoothed train loss decreases start to finish
    const auto mean3 = [&](std::size_t at) {
        return (r.log[at].train_loss + r.log[at + 1].train_loss + r.log[at + 2].train_loss) / 3.0;
    };
    CHECK(mean3(r.log.size() - 3) < mean3(0));
}

TEST_CASE("retraining recovers pruned accuracy on the train split") {
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto task = generate_task(TaskKind::adding_problem, 100 + seed, {256, 64, 64, 0});
        TrainConfig cfg = default_config(TaskKind::adding_problem);
        cfg.epochs = 30;
        cfg.seed = seed + 1;
        const auto base = train(task, {2, 16}, cfg);

        const auto pruned = pruning::apply_dual_prune(base.net.lstm, 50.0, 50.0);
        Network pnet = base.net;
        pnet.lstm = pruned.params;
        const double before = evaluate(pnet, task, Split::train).loss;

        TrainConfig re = cfg;
        re.epochs = 10;
        const Network tuned = retrain_masked(pnet, pruned.masks, task, re);
        const double after = evaluate(tuned, task, Split::train).loss;
        if (after < before) ++improved;
    }
    MESSAGE("retraining improved train loss in ", improved, "/5 trials");
    CHECK(improved >= 5);  // >=90% of seeded trials
}

TEST_CASE("evaluate") {
    SUBCASE("uniform predictions give perplexity = vocabulary size") {
        const auto task = generate_task(TaskKind::char_lm, 8, {16, 8, 8, 0});
        Network net;
        net.lstm = lstm::LstmParams::zeros({kCharLmVocab, 4});
        net.w_out = Mat(kCharLmVocab, 4);
        net.b_out = Vec(kCharLmVocab, 0.0);
        const auto ev = evaluate(net, task);
        CHECK(ev.metric == doctest::Approx(kCharLmVocab).epsilon(1e-9));
    }

    SUBCASE("perfect predictor on parity scores accuracy 1.0") {
        // single-step parity is the sign of the lone input bit; a one-unit
        // LSTM with a saturated input gate realizes it exactly
        const auto task = generate_task(TaskKind::sequence_parity, 5, {8, 8, 8, 1});
        Network net;
        net.lstm = lstm::LstmParams::zeros({1, 1});
        net.lstm.w_x[lstm::kGateG].at(0, 0) = 5.0;
        net.lstm.b[lstm::kGateI] = {10.0};
        net.lstm.b[lstm::kGateO] = {10.0};
        net.w_out = Mat(1, 1);
        net.w_out.at(0, 0) = 10.0;
        net.b_out = Vec(1, 0.0);
        const auto ev = evaluate(net, task);
        CHECK(ev.metric == 1.0);
        CHECK(ev.score == 1.0);
    }

    SUBCASE("evaluate is pure") {
        const auto task = generate_task(TaskKind::adding_problem, 2, {16, 8, 8, 0});
        const Network net = init_network({2, 4}, 1, 3);
        const auto a = evaluate(net, task);
        const auto b = evaluate(net, task);
        CHECK(a.loss == b.loss);
        CHECK(a.score == b.score);
    }
}

TEST_CASE("checkpoint round trip") {
    const Network net = init_network({2, 5}, 1, 17);
    const std::string model_path = "trainer_test_model.json";
    const std::string sidecar_path = "trainer_test_sidecar.json";
    save_network(net, model_path, sidecar_path, 12);
    const Network back = load_network(model_path, sidecar_path);
    CHECK(networks_equal(net, back));
    std::remove(model_path.c_str());
    std::remove(sidecar_path.c_str());
}
