#include "brds/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "brds/model_io.hpp"

namespace brds::trainer {
namespace {

using lstm::kGateF;
using lstm::kGateG;
using lstm::kGateI;
using lstm::kGateO;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// --------------------------------------------------------------------------
// Task generation
// --------------------------------------------------------------------------

Example gen_adding(std::mt19937_64& rng, int T) {
    Example ex;
    ex.inputs.assign(T, Vec(2, 0.0));
    for (int t = 0; t < T; ++t) ex.inputs[t][0] = uniform01(rng);
    const int i = static_cast<int>(randint(rng, T / 2));
    const int j = T / 2 + static_cast<int>(randint(rng, T - T / 2));
    ex.inputs[i][1] = 1.0;
    ex.inputs[j][1] = 1.0;
    ex.final_target = {ex.inputs[i][0] + ex.inputs[j][0]};
    return ex;
}

Example gen_parity(std::mt19937_64& rng, int T) {
    Example ex;
    ex.inputs.assign(T, Vec(1, 0.0));
    int ones = 0;
    for (int t = 0; t < T; ++t) {
        const int bit = static_cast<int>(randint(rng, 2));
        ones += bit;
        ex.inputs[t][0] = bit ? 1.0 : -1.0;
    }
    ex.final_target = {static_cast<double>(ones & 1)};
    return ex;
}

Example gen_char_lm(std::mt19937_64& rng, int T, const std::array<int, 3>& deltas) {
    Example ex;
    std::vector<int> symbols(T + 1);
    symbols[0] = static_cast<int>(randint(rng, kCharLmVocab));
    for (int t = 1; t <= T; ++t) {
        if (randint(rng, 10) == 0)  // 10% noise
            symbols[t] = static_cast<int>(randint(rng, kCharLmVocab));
        else
            symbols[t] = (symbols[t - 1] + deltas[(t - 1) % 3]) % kCharLmVocab;
    }
    ex.inputs.assign(T, Vec(kCharLmVocab, 0.0));
    ex.step_targets.resize(T);
    for (int t = 0; t < T; ++t) {
        ex.inputs[t][symbols[t]] = 1.0;
        ex.step_targets[t] = symbols[t + 1];
    }
    return ex;
}

} // namespace

TaskKind task_kind_from_name(const std::string& name) {
    if (name == "adding") return TaskKind::adding_problem;
    if (name == "parity") return TaskKind::sequence_parity;
    if (name == "char_lm") return TaskKind::char_lm;
    throw ConfigError("unknown task '" + name + "' (adding|parity|char_lm)");
}

const char* task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::adding_problem: return "adding";
        case TaskKind::sequence_parity: return "parity";
        case TaskKind::char_lm: return "char_lm";
    }
    return "?";
}

TrainConfig default_config(TaskKind kind) {
    TrainConfig cfg;
    switch (kind) {
        case TaskKind::adding_problem:
            cfg.lr = 0.5;
            cfg.batch = 8;
            cfg.epochs = 50;
            break;
        case TaskKind::sequence_parity:
            cfg.lr = 0.5;
            cfg.batch = 8;
            cfg.epochs = 60;
            break;
        case TaskKind::char_lm:
            cfg.lr = 1.0;
            cfg.lr_decay = 0.95;
            cfg.batch = 16;
            cfg.epochs = 30;
            break;
    }
    return cfg;
}

Task generate_task(TaskKind kind, std::uint64_t seed, const TaskSizes& sizes) {
    config_check(sizes.train_n >= 1 && sizes.val_n >= 1 && sizes.test_n >= 1,
                 "generate_task: split sizes must be >= 1");
    Task task;
    task.kind = kind;
    task.seed = seed;
    std::mt19937_64 rng(seed ^ 0x5eedULL);

    switch (kind) {
        case TaskKind::adding_problem:
            task.loss = LossKind::mse;
            task.input_dim = 2;
            task.output_dim = 1;
            task.seq_len = sizes.seq_len > 0 ? sizes.seq_len : 20;
            break;
        case TaskKind::sequence_parity:
            task.loss = LossKind::cross_entropy;
            task.input_dim = 1;
            task.output_dim = 1;
            task.seq_len = sizes.seq_len > 0 ? sizes.seq_len : 16;
            break;
        case TaskKind::char_lm:
            task.loss = LossKind::cross_entropy;
            task.input_dim = kCharLmVocab;
            task.output_dim = kCharLmVocab;
            task.seq_len = sizes.seq_len > 0 ? sizes.seq_len : 32;
            break;
    }
    config_check(task.seq_len >= 1, "generate_task: sequence length must be >= 1");

    std::array<int, 3> deltas{};
    if (kind == TaskKind::char_lm)
        for (auto& d : deltas) d = 1 + static_cast<int>(randint(rng, kCharLmVocab - 1));

    const auto gen_split = [&](int n, std::vector<Example>& out) {
        out.reserve(n);
        for (int e = 0; e < n; ++e) {
            switch (kind) {
                case TaskKind::adding_problem: out.push_back(gen_adding(rng, task.seq_len)); break;
                case TaskKind::sequence_parity: out.push_back(gen_parity(rng, task.seq_len)); break;
                case TaskKind::char_lm: out.push_back(gen_char_lm(rng, task.seq_len, deltas)); break;
            }
        }
    };
    gen_split(sizes.train_n, task.train);
    gen_split(sizes.val_n, task.val);
    gen_split(sizes.test_n, task.test);
    return task;
}

// --------------------------------------------------------------------------
// Network init
// --------------------------------------------------------------------------

Network init_network(const lstm::LstmDims& dims, int output_dim, std::uint64_t seed) {
    dims.validate();
    config_check(output_dim >= 1, "init_network: output_dim must be >= 1");
    std::mt19937_64 rng(seed ^ 0x1217ULL);
    const double s = 1.0 / std::sqrt(static_cast<double>(dims.hidden));

    Network net;
    net.lstm = lstm::LstmParams::zeros(dims);
    for (int g = 0; g < 4; ++g) {
        for (auto& v : net.lstm.w_x[g].d) v = uniform(rng, -s, s);
        for (auto& v : net.lstm.w_h[g].d) v = uniform(rng, -s, s);
    }
    // forget-gate bias starts open
    for (auto& v : net.lstm.b[kGateF]) v = 1.0;

    net.w_out = Mat(output_dim, dims.hidden);
    for (auto& v : net.w_out.d) v = uniform(rng, -s, s);
    net.b_out = Vec(output_dim, 0.0);
    return net;
}

NetGrads NetGrads::zeros(const lstm::LstmDims& dims, int output_dim) {
    NetGrads g;
    for (int k = 0; k < 4; ++k) {
        g.w_x[k] = Mat(dims.hidden, dims.input);
        g.w_h[k] = Mat(dims.hidden, dims.hidden);
        g.b[k] = Vec(dims.hidden, 0.0);
    }
    g.w_out = Mat(output_dim, dims.hidden);
    g.b_out = Vec(output_dim, 0.0);
    return g;
}

// --------------------------------------------------------------------------
// Forward / backward
// --------------------------------------------------------------------------

namespace {

struct StepCache {
    Vec f, i, g, o, c, tanh_c, h;
};

struct ForwardCache {
    std::vector<StepCache> steps;
    std::vector<Vec> readout;  // per step for char_lm, final-only otherwise
};

void forward_example(const Network& net, const Example& ex, bool per_step_readout,
                     ForwardCache& cache) {
    const int H = net.lstm.dims.hidden;
    const int T = static_cast<int>(ex.inputs.size());
    cache.steps.resize(T);
    cache.readout.clear();

    Vec h(H, 0.0), c(H, 0.0), tmp;
    std::array<Vec, 4> pre;
    for (int t = 0; t < T; ++t) {
        StepCache& sc = cache.steps[t];
        for (int g = 0; g < 4; ++g) {
            mxv_into(net.lstm.w_x[g], ex.inputs[t], pre[g]);
            mxv_into(net.lstm.w_h[g], h, tmp);
            for (int r = 0; r < H; ++r)
                pre[g][r] = (pre[g][r] + tmp[r]) + net.lstm.b[g][r];
        }
        sc.f.resize(H); sc.i.resize(H); sc.g.resize(H); sc.o.resize(H);
        sc.c.resize(H); sc.tanh_c.resize(H); sc.h.resize(H);
        for (int r = 0; r < H; ++r) {
            sc.f[r] = sigmoid(pre[kGateF][r]);
            sc.i[r] = sigmoid(pre[kGateI][r]);
            sc.g[r] = std::tanh(pre[kGateG][r]);
            sc.o[r] = sigmoid(pre[kGateO][r]);
            sc.c[r] = sc.f[r] * c[r] + sc.i[r] * sc.g[r];
            sc.tanh_c[r] = std::tanh(sc.c[r]);
            sc.h[r] = sc.o[r] * sc.tanh_c[r];
        }
        h = sc.h;
        c = sc.c;
        if (per_step_readout) {
            Vec y = mxv(net.w_out, h);
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += net.b_out[k];
            cache.readout.push_back(std::move(y));
        }
    }
    if (!per_step_readout) {
        Vec y = mxv(net.w_out, h);
        for (std::size_t k = 0; k < y.size(); ++k) y[k] += net.b_out[k];
        cache.readout.push_back(std::move(y));
    }
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// loss value + d(loss)/d(readout) per readout vector
double example_loss(const Task& task, const Example& ex, const ForwardCache& cache,
                    std::vector<Vec>* dy_out) {
    if (task.kind == TaskKind::char_lm) {
        const int T = static_cast<int>(ex.step_targets.size());
        double total = 0.0;
        if (dy_out) dy_out->assign(T, Vec(task.output_dim, 0.0));
        for (int t = 0; t < T; ++t) {
            const Vec& y = cache.readout[t];
            double mx = y[0];
            for (double v : y) mx = std::max(mx, v);
            double lse = 0.0;
            for (double v : y) lse += std::exp(v - mx);
            lse = mx + std::log(lse);
            total += lse - y[ex.step_targets[t]];
            if (dy_out) {
                Vec& dy = (*dy_out)[t];
                for (int k = 0; k < task.output_dim; ++k)
                    dy[k] = std::exp(y[k] - lse) / T;
                dy[ex.step_targets[t]] -= 1.0 / T;
            }
        }
        return total / T;
    }

    const Vec& y = cache.readout.back();
    if (task.loss == LossKind::mse) {
        double l = 0.0;
        if (dy_out) dy_out->assign(1, Vec(task.output_dim, 0.0));
        for (int k = 0; k < task.output_dim; ++k) {
            const double d = y[k] - ex.final_target[k];
            l += d * d;
            if (dy_out) (*dy_out)[0][k] = 2.0 * d;
        }
        return l;
    }
    // binary cross-entropy on a single logit
    const double target = ex.final_target[0];
    const double logit = y[0];
    if (dy_out) {
        dy_out->assign(1, Vec(1, sigmoid(logit) - target));
    }
    return softplus(logit) - target * logit;
}

void backward_example(const Network& net, const Example& ex, const Task& task,
                      const ForwardCache& cache, const std::vector<Vec>& dy,
                      NetGrads& grads) {
    const int H = net.lstm.dims.hidden;
    const int T = static_cast<int>(ex.inputs.size());
    const bool per_step = task.kind == TaskKind::char_lm;

    Vec dh(H, 0.0), dc(H, 0.0);
    Vec dpre_f(H), dpre_i(H), dpre_g(H), dpre_o(H);
    const Vec zero_h(H, 0.0), zero_c(H, 0.0);

    const auto add_readout_grad = [&](int t, const Vec& dyt) {
        outer_acc(grads.w_out, dyt, cache.steps[t].h);
        for (std::size_t k = 0; k < dyt.size(); ++k) grads.b_out[k] += dyt[k];
        tmv_acc(net.w_out, dyt, dh);
    };

    if (!per_step) add_readout_grad(T - 1, dy[0]);

    for (int t = T - 1; t >= 0; --t) {
        if (per_step) add_readout_grad(t, dy[t]);
        const StepCache& sc = cache.steps[t];
        const Vec& h_prev = t > 0 ? cache.steps[t - 1].h : zero_h;
        const Vec& c_prev = t > 0 ? cache.steps[t - 1].c : zero_c;

        for (int r = 0; r < H; ++r) {
            const double do_ = dh[r] * sc.tanh_c[r];
            dc[r] += dh[r] * sc.o[r] * (1.0 - sc.tanh_c[r] * sc.tanh_c[r]);
            const double df = dc[r] * c_prev[r];
            const double di = dc[r] * sc.g[r];
            const double dg = dc[r] * sc.i[r];
            dpre_f[r] = df * sc.f[r] * (1.0 - sc.f[r]);
            dpre_i[r] = di * sc.i[r] * (1.0 - sc.i[r]);
            dpre_g[r] = dg * (1.0 - sc.g[r] * sc.g[r]);
            dpre_o[r] = do_ * sc.o[r] * (1.0 - sc.o[r]);
            dc[r] *= sc.f[r];
        }

        const std::array<const Vec*, 4> dpre = {&dpre_f, &dpre_i, &dpre_g, &dpre_o};
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int g = 0; g < 4; ++g) {
            outer_acc(grads.w_x[g], *dpre[g], ex.inputs[t]);
            outer_acc(grads.w_h[g], *dpre[g], h_prev);
            for (int r = 0; r < H; ++r) grads.b[g][r] += (*dpre[g])[r];
            tmv_acc(net.lstm.w_h[g], *dpre[g], dh);
        }
    }
}

double check_finite(double loss) {
    data_check(std::isfinite(loss), "training diverged: non-finite loss");
    return loss;
}

} // namespace

double batch_loss(const Network& net, const Task& task,
                  const std::vector<const Example*>& batch) {
    const bool per_step = task.kind == TaskKind::char_lm;
    ForwardCache cache;
    double total = 0.0;
    for (const Example* ex : batch) {
        forward_example(net, *ex, per_step, cache);
        total += example_loss(task, *ex, cache, nullptr);
    }
    return total / static_cast<double>(batch.size());
}

double batch_loss_and_grads(const Network& net, const Task& task,
                            const std::vector<const Example*>& batch, NetGrads& grads) {
    const bool per_step = task.kind == TaskKind::char_lm;
    ForwardCache cache;
    std::vector<Vec> dy;
    double total = 0.0;
    for (const Example* ex : batch) {
        forward_example(net, *ex, per_step, cache);
        total += example_loss(task, *ex, cache, &dy);
        backward_example(net, *ex, task, cache, dy, grads);
    }
    // mean over the batch
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (int g = 0; g < 4; ++g) {
        for (auto& v : grads.w_x[g].d) v *= inv;
        for (auto& v : grads.w_h[g].d) v *= inv;
        for (auto& v : grads.b[g]) v *= inv;
    }
    for (auto& v : grads.w_out.d) v *= inv;
    for (auto& v : grads.b_out) v *= inv;
    return total * inv;
}

// --------------------------------------------------------------------------
// SGD loop
// --------------------------------------------------------------------------

namespace {

void mask_grads(NetGrads& grads, const pruning::DualMasks& masks) {
    for (int g = 0; g < 4; ++g) {
        for (std::size_t i = 0; i < grads.w_x[g].d.size(); ++i)
            if (!masks.x[g].d[i]) grads.w_x[g].d[i] = 0.0;
        for (std::size_t i = 0; i < grads.w_h[g].d.size(); ++i)
            if (!masks.h[g].d[i]) grads.w_h[g].d[i] = 0.0;
    }
}

double grad_norm(const NetGrads& g) {
    double sq = 0.0;
    for (int k = 0; k < 4; ++k) {
        sq += kernels::nrm2sq_f64(g.w_x[k].d.data(), g.w_x[k].d.size());
        sq += kernels::nrm2sq_f64(g.w_h[k].d.data(), g.w_h[k].d.size());
        sq += kernels::nrm2sq_f64(g.b[k].data(), g.b[k].size());
    }
    sq += kernels::nrm2sq_f64(g.w_out.d.data(), g.w_out.d.size());
    sq += kernels::nrm2sq_f64(g.b_out.data(), g.b_out.size());
    return std::sqrt(sq);
}

void sgd_step(Network& net, const NetGrads& g, double lr) {
    for (int k = 0; k < 4; ++k) {
        kernels::axpy_f64(net.lstm.w_x[k].d.data(), -lr, g.w_x[k].d.data(), g.w_x[k].d.size());
        kernels::axpy_f64(net.lstm.w_h[k].d.data(), -lr, g.w_h[k].d.data(), g.w_h[k].d.size());
        kernels::axpy_f64(net.lstm.b[k].data(), -lr, g.b[k].data(), g.b[k].size());
    }
    kernels::axpy_f64(net.w_out.d.data(), -lr, g.w_out.d.data(), g.w_out.d.size());
    kernels::axpy_f64(net.b_out.data(), -lr, g.b_out.data(), g.b_out.size());
}

} // namespace

TrainResult train_network(const Network& start, const Task& task, const TrainConfig& cfg,
                          const pruning::DualMasks* masks) {
    cfg.validate();
    data_check(start.lstm.dims.input == task.input_dim,
               "train: network input size does not match task");
    data_check(start.w_out.rows == task.output_dim,
               "train: readout size does not match task");
    if (masks) {
        for (int g = 0; g < 4; ++g) {
            data_check(masks->x[g].rows == start.lstm.dims.hidden &&
                       masks->x[g].cols == start.lstm.dims.input &&
                       masks->h[g].rows == start.lstm.dims.hidden &&
                       masks->h[g].cols == start.lstm.dims.hidden,
                       "train: mask dimension mismatch");
        }
    }

    using clock = std::chrono::steady_clock;
    TrainResult result;
    result.net = start;

    std::vector<int> order(task.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    NetGrads grads = NetGrads::zeros(start.lstm.dims, task.output_dim);
    std::vector<const Example*> batch;
    double lr = cfg.lr;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = clock::now();
        std::mt19937_64 shuffle_rng(cfg.seed * 0x9e3779b97f4a7c15ULL + epoch);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[randint(shuffle_rng, i)]);

        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t at = 0; at < order.size(); at += cfg.batch) {
            batch.clear();
            for (std::size_t j = at; j < std::min(order.size(), at + cfg.batch); ++j)
                batch.push_back(&task.train[order[j]]);

            grads = NetGrads::zeros(start.lstm.dims, task.output_dim);
            epoch_loss += check_finite(batch_loss_and_grads(result.net, task, batch, grads));
            ++batches;

            if (masks) mask_grads(grads, *masks);
            const double norm = grad_norm(grads);
            const double scale = norm > cfg.clip ? cfg.clip / norm : 1.0;
            sgd_step(result.net, grads, lr * scale);
        }
        const double val_metric = evaluate(result.net, task, Split::val).metric;
        result.log.push_back({epoch, epoch_loss / batches, val_metric,
                              std::chrono::duration<double>(clock::now() - t0).count()});
        lr *= cfg.lr_decay;
    }
    return result;
}

TrainResult train(const Task& task, const lstm::LstmDims& dims, const TrainConfig& cfg) {
    return train_network(init_network(dims, task.output_dim, cfg.seed), task, cfg, nullptr);
}

Network retrain_masked(const Network& net, const pruning::DualMasks& masks,
                       const Task& task, const TrainConfig& cfg) {
    return train_network(net, task, cfg, &masks).net;
}

// --------------------------------------------------------------------------
// Evaluation
// --------------------------------------------------------------------------

EvalResult evaluate(const Network& net, const Task& task, Split split) {
    const std::vector<Example>* examples = &task.val;
    if (split == Split::train) examples = &task.train;
    if (split == Split::test) examples = &task.test;
    data_check(!examples->empty(), "evaluate: empty split");

    const bool per_step = task.kind == TaskKind::char_lm;
    ForwardCache cache;
    double total = 0.0;
    double correct = 0.0;
    for (const Example& ex : *examples) {
        forward_example(net, ex, per_step, cache);
        total += example_loss(task, ex, cache, nullptr);
        if (task.kind == TaskKind::sequence_parity) {
            const double p = sigmoid(cache.readout.back()[0]);
            correct += (p > 0.5 ? 1.0 : 0.0) == ex.final_target[0] ? 1.0 : 0.0;
        }
    }
    const double n = static_cast<double>(examples->size());
    EvalResult r;
    r.loss = total / n;
    switch (task.kind) {
        case TaskKind::adding_problem:
            r.metric = r.loss;
            r.score = -r.loss;
            break;
        case TaskKind::sequence_parity:
            r.metric = correct / n;
            r.score = r.metric;
            break;
        case TaskKind::char_lm:
            r.metric = std::exp(r.loss);  // perplexity
            r.score = -r.metric;
            break;
    }
    return r;
}

// --------------------------------------------------------------------------
// Checkpoint I/O
// --------------------------------------------------------------------------

void save_network(const Network& net, const std::string& model_path,
                  const std::string& sidecar_path, int epoch) {
    lstm::save_model(net.lstm, model_path);
    nlohmann::json j;
    j["epoch"] = epoch;
    j["optimizer"] = "sgd";
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < net.w_out.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < net.w_out.cols; ++c) row.push_back(net.w_out.at(r, c));
        rows.push_back(std::move(row));
    }
    j["readout"]["w_out"] = std::move(rows);
    j["readout"]["b_out"] = net.b_out;
    std::ofstream out(sidecar_path, std::ios::binary | std::ios::trunc);
    data_check(out.good(), "save_network: cannot open " + sidecar_path);
    out << j.dump(1);
    data_check(out.good(), "save_network: write failed");
}

Network load_network(const std::string& model_path, const std::string& sidecar_path) {
    const auto model = lstm::load_model(model_path);
    data_check(model.as_float.has_value(), "load_network: checkpoint must be a float model");
    std::ifstream in(sidecar_path, std::ios::binary);
    data_check(in.good(), "load_network: cannot open " + sidecar_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("load_network: bad sidecar: ") + e.what());
    }
    Network net;
    net.lstm = *model.as_float;
    const auto& rows = j.at("readout").at("w_out");
    const int O = static_cast<int>(rows.size());
    data_check(O >= 1, "load_network: empty readout");
    const int H = static_cast<int>(rows[0].size());
    data_check(H == net.lstm.dims.hidden, "load_network: readout width mismatch");
    net.w_out = Mat(O, H);
    for (int r = 0; r < O; ++r)
        for (int c = 0; c < H; ++c) net.w_out.at(r, c) = rows[r][c].get<double>();
    net.b_out = j.at("readout").at("b_out").get<Vec>();
    data_check(static_cast<int>(net.b_out.size()) == O, "load_network: bias size mismatch");
    return net;
}

void save_task_meta(const Task& task, const TaskSizes& sizes, const std::string& path) {
    nlohmann::json j;
    j["kind"] = task_kind_name(task.kind);
    j["seed"] = task.seed;
    j["train_n"] = sizes.train_n;
    j["val_n"] = sizes.val_n;
    j["test_n"] = sizes.test_n;
    j["seq_len"] = task.seq_len;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    data_check(out.good(), "save_task_meta: cannot open " + path);
    out << j.dump(1);
}

Task load_task_from_meta(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    data_check(in.good(), "load_task_from_meta: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("load_task_from_meta: ") + e.what());
    }
    TaskSizes sizes;
    sizes.train_n = j.at("train_n").get<int>();
    sizes.val_n = j.at("val_n").get<int>();
    sizes.test_n = j.at("test_n").get<int>();
    sizes.seq_len = j.at("seq_len").get<int>();
    return generate_task(task_kind_from_name(j.at("kind").get<std::string>()),
                         j.at("seed").get<std::uint64_t>(), sizes);
}

void write_train_log_csv(const std::vector<EpochRow>& log, std::ostream& os) {
    os << "epoch,train_loss,val_metric,wall_s\n";
    for (const auto& r : log)
        os << r.epoch << ',' << r.train_loss << ',' << r.val_metric << ',' << r.wall_s << '\n';
}

} // namespace brds::trainer
