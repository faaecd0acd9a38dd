// brds — command-line front end for the sparse-LSTM pipeline:
//   train -> prune/search/sweep -> quantize -> build-image -> simulate -> report
//
// Every command writes its artifacts plus a manifest.json into --out.
// Primary artifacts (models, masks, images, result/report JSON, sweep CSV)
// are byte-reproducible given the same manifest inputs; logs and traces
// carry wall-clock timings and are auxiliary. Exit codes: 0 success,
// 2 usage/config error, 3 data/validation error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "brds/accel.hpp"
#include "brds/memory_image.hpp"
#include "brds/model_io.hpp"
#include "brds/pruning.hpp"
#include "brds/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace brds;

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    data_check(out.good(), "cannot open " + path.string());
    out << text;
    data_check(out.good(), "write failed for " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::string& config_path, std::uint64_t seed,
                    const json& inputs, const std::vector<std::string>& primary,
                    const std::vector<std::string>& auxiliary) {
    json j;
    j["command"] = command;
    j["config"] = config_path;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"]["primary"] = primary;
    j["outputs"]["auxiliary"] = auxiliary;
    j["tool_version"] = kToolVersion;
    j["timestamp"] = iso_timestamp();
    write_text_file(dir / "manifest.json", j.dump(1));
}

fs::path require_out_dir(const std::string& out) {
    const fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

// --------------------------------------------------------------------------
// Checkpoint helpers
// --------------------------------------------------------------------------

struct Checkpoint {
    trainer::Network net;
    trainer::Task task;
    bool has_masks = false;
    pruning::DualMasks masks;
};

Checkpoint load_checkpoint(const std::string& dir) {
    const fs::path p(dir);
    Checkpoint ck;
    ck.net = trainer::load_network((p / "model.json").string(), (p / "readout.json").string());
    ck.task = trainer::load_task_from_meta((p / "task.json").string());
    if (fs::exists(p / "masks.json")) {
        ck.has_masks = true;
        lstm::load_masks((p / "masks.json").string(), ck.masks.x, ck.masks.h);
    }
    return ck;
}

void copy_task_meta(const std::string& from_dir, const fs::path& to_dir) {
    fs::copy_file(fs::path(from_dir) / "task.json", to_dir / "task.json",
                  fs::copy_options::overwrite_existing);
}

json eval_to_json(const trainer::EvalResult& ev, const trainer::Task& task) {
    json j;
    j["loss"] = ev.loss;
    j["score"] = ev.score;
    switch (task.kind) {
        case trainer::TaskKind::adding_problem: j["mse"] = ev.metric; break;
        case trainer::TaskKind::sequence_parity: j["accuracy"] = ev.metric; break;
        case trainer::TaskKind::char_lm: j["perplexity"] = ev.metric; break;
    }
    return j;
}

// --------------------------------------------------------------------------
// train
// --------------------------------------------------------------------------

struct TrainArgs {
    std::string task = "adding";
    std::uint64_t data_seed = 0;
    std::uint64_t train_seed = 1;
    int hidden = 16;
    int train_n = 1024, val_n = 256, test_n = 256, seq_len = 0;
    int epochs = -1, batch = -1;
    double lr = -1, clip = -1, lr_decay = -1;
    std::string out;
};

int cmd_train(const TrainArgs& a, const std::string& config_path) {
    const auto kind = trainer::task_kind_from_name(a.task);
    trainer::TaskSizes sizes{a.train_n, a.val_n, a.test_n, a.seq_len};
    const auto task = trainer::generate_task(kind, a.data_seed, sizes);

    trainer::TrainConfig cfg = trainer::default_config(kind);
    cfg.seed = a.train_seed;
    if (a.epochs >= 0) cfg.epochs = a.epochs;
    if (a.batch > 0) cfg.batch = a.batch;
    if (a.lr > 0) cfg.lr = a.lr;
    if (a.clip > 0) cfg.clip = a.clip;
    if (a.lr_decay > 0) cfg.lr_decay = a.lr_decay;

    const auto dir = require_out_dir(a.out);
    const auto result = trainer::train(task, {task.input_dim, a.hidden}, cfg);

    trainer::save_network(result.net, (dir / "model.json").string(),
                          (dir / "readout.json").string(), cfg.epochs);
    trainer::save_task_meta(task, sizes, (dir / "task.json").string());
    std::ostringstream log;
    trainer::write_train_log_csv(result.log, log);
    write_text_file(dir / "train_log.csv", log.str());

    const auto ev = trainer::evaluate(result.net, task, trainer::Split::val);
    write_text_file(dir / "eval.json", eval_to_json(ev, task).dump(1));

    write_manifest(dir, "train", config_path, a.train_seed,
                   json{{"task", a.task}, {"data_seed", a.data_seed}, {"hidden", a.hidden},
                        {"epochs", cfg.epochs}, {"lr", cfg.lr}, {"batch", cfg.batch}},
                   {"model.json", "readout.json", "task.json", "eval.json"},
                   {"train_log.csv"});
    std::cout << "trained " << a.task << " model (H=" << a.hidden << "), val loss "
              << ev.loss << " -> " << dir.string() << "\n";
    return 0;
}

// --------------------------------------------------------------------------
// prune
// --------------------------------------------------------------------------

int cmd_prune(const std::string& checkpoint, double spar_x, double spar_h,
              const std::string& out, const std::string& config_path) {
    const auto ck = load_checkpoint(checkpoint);
    const auto dir = require_out_dir(out);
    const auto pruned = pruning::apply_dual_prune(ck.net.lstm, spar_x, spar_h);

    trainer::Network net = ck.net;
    net.lstm = pruned.params;
    trainer::save_network(net, (dir / "model.json").string(), (dir / "readout.json").string());
    lstm::save_masks(pruned.masks.x, pruned.masks.h, (dir / "masks.json").string());
    copy_task_meta(checkpoint, dir);

    json info;
    info["spar_x"] = spar_x;
    info["spar_h"] = spar_h;
    info["k_x"] = pruned.k_x;
    info["k_h"] = pruned.k_h;
    write_text_file(dir / "prune.json", info.dump(1));

    write_manifest(dir, "prune", config_path, 0,
                   json{{"checkpoint", checkpoint}, {"spar_x", spar_x}, {"spar_h", spar_h}},
                   {"model.json", "readout.json", "masks.json", "task.json", "prune.json"}, {});
    std::cout << "pruned to Spar_x=" << spar_x << "% Spar_h=" << spar_h
              << "% (X_SP=" << pruned.k_x << ", H_SP=" << pruned.k_h << ")\n";
    return 0;
}

// --------------------------------------------------------------------------
// search
// --------------------------------------------------------------------------

struct SearchArgs {
    std::string checkpoint;
    double os = 60.0, alpha = 10.0, delta_x = 5.0, delta_h = 5.0;
    int n_re = 5;
    double lr = -1;
    std::string out;
};

int cmd_search(const SearchArgs& a, const std::string& config_path) {
    const auto ck = load_checkpoint(a.checkpoint);
    const auto dir = require_out_dir(a.out);

    trainer::TrainConfig recfg = trainer::default_config(ck.task.kind);
    recfg.epochs = a.n_re;
    if (a.lr > 0) recfg.lr = a.lr;

    pruning::SearchResult<trainer::Network> result;
    if (a.os == 0.0) {
        // degenerate request: nothing to prune, report the checkpoint as-is
        result.spar_x = 0.0;
        result.spar_h = 0.0;
        result.model = ck.net;
        result.best = trainer::evaluate(ck.net, ck.task).record();
        for (int g = 0; g < 4; ++g) {
            result.masks.x[g] = lstm::Mask(ck.net.lstm.dims.hidden, ck.net.lstm.dims.input, 1);
            result.masks.h[g] = lstm::Mask(ck.net.lstm.dims.hidden, ck.net.lstm.dims.hidden, 1);
        }
        result.trace.push_back({0, 1, 0.0, 0.0, result.best.score, result.best.loss, 0.0});
    } else {
        const pruning::SparsityConfig cfg{a.os, a.alpha, a.delta_x, a.delta_h};
        pruning::PruneFn<trainer::Network> prune_fn =
            [](const trainer::Network& m, double sx, double sh) {
                auto r = pruning::apply_dual_prune(m.lstm, sx, sh);
                trainer::Network next = m;
                next.lstm = std::move(r.params);
                return std::make_pair(std::move(next), std::move(r.masks));
            };
        pruning::RetrainFn<trainer::Network> retrain_fn =
            [&](const trainer::Network& m, const pruning::DualMasks& masks) {
                return trainer::retrain_masked(m, masks, ck.task, recfg);
            };
        pruning::EvalFn<trainer::Network> eval_fn = [&](const trainer::Network& m) {
            return trainer::evaluate(m, ck.task).record();
        };
        result = pruning::brds_search<trainer::Network>(ck.net, cfg, prune_fn, retrain_fn,
                                                        eval_fn, &std::cerr);
    }

    trainer::save_network(result.model, (dir / "model.json").string(),
                          (dir / "readout.json").string());
    lstm::save_masks(result.masks.x, result.masks.h, (dir / "masks.json").string());
    copy_task_meta(a.checkpoint, dir);

    std::ostringstream trace;
    pruning::write_trace_csv(result.trace, trace);
    write_text_file(dir / "trace.csv", trace.str());

    json res;
    res["MA"] = result.best.score;
    res["loss"] = result.best.loss;
    res["Spar_x_MA"] = result.spar_x;
    res["Spar_h_MA"] = result.spar_h;
    res["mask_file"] = "masks.json";
    res["candidates"] = result.trace.size();
    res["n_re"] = a.n_re;
    write_text_file(dir / "result.json", res.dump(1));

    write_manifest(dir, "search", config_path, recfg.seed,
                   json{{"checkpoint", a.checkpoint}, {"os", a.os}, {"alpha", a.alpha},
                        {"delta_x", a.delta_x}, {"delta_h", a.delta_h}, {"n_re", a.n_re}},
                   {"model.json", "readout.json", "masks.json", "task.json", "result.json"},
                   {"trace.csv"});
    std::cout << "search done: MA=" << result.best.score << " at (Spar_x="
              << result.spar_x << ", Spar_h=" << result.spar_h << "), "
              << result.trace.size() << " candidates\n";
    return 0;
}

// --------------------------------------------------------------------------
// sweep
// --------------------------------------------------------------------------

struct SweepArgs {
    std::string checkpoint;
    double os = 65.0, step = 5.0;
    int points = 3;  // each side of the uniform point
    int n_re = 5;
    std::string out;
};

int cmd_sweep(const SweepArgs& a, const std::string& config_path) {
    const auto ck = load_checkpoint(a.checkpoint);
    const auto dir = require_out_dir(a.out);

    trainer::TrainConfig recfg = trainer::default_config(ck.task.kind);
    recfg.epochs = a.n_re;

    std::vector<std::pair<double, double>> grid;
    for (int i = -a.points; i <= a.points; ++i) {
        const double sx = a.os + i * a.step;
        const double sh = a.os - i * a.step;
        if (sx < 0.0 || sx > 100.0 || sh < 0.0 || sh > 100.0) continue;
        grid.emplace_back(sx, sh);
    }

    pruning::PruneFn<trainer::Network> prune_fn =
        [](const trainer::Network& m, double sx, double sh) {
            auto r = pruning::apply_dual_prune(m.lstm, sx, sh);
            trainer::Network next = m;
            next.lstm = std::move(r.params);
            return std::make_pair(std::move(next), std::move(r.masks));
        };
    pruning::RetrainFn<trainer::Network> retrain_fn =
        [&](const trainer::Network& m, const pruning::DualMasks& masks) {
            return trainer::retrain_masked(m, masks, ck.task, recfg);
        };
    pruning::EvalFn<trainer::Network> eval_fn = [&](const trainer::Network& m) {
        return trainer::evaluate(m, ck.task).record();
    };

    const auto points = pruning::dual_ratio_sweep<trainer::Network>(
        ck.net, a.os, grid, prune_fn, retrain_fn, eval_fn);

    std::ostringstream csv;
    pruning::write_sweep_csv(points, csv);
    write_text_file(dir / "sweep.csv", csv.str());

    write_manifest(dir, "sweep", config_path, recfg.seed,
                   json{{"checkpoint", a.checkpoint}, {"os", a.os}, {"step", a.step},
                        {"points", a.points}, {"n_re", a.n_re}},
                   {"sweep.csv"}, {});
    std::cout << "sweep wrote " << points.size() << " points -> "
              << (dir / "sweep.csv").string() << "\n";
    return 0;
}

// --------------------------------------------------------------------------
// quantize
// --------------------------------------------------------------------------

int cmd_quantize(const std::string& checkpoint, int n, int f, const std::string& out,
                 const std::string& config_path) {
    const auto ck = load_checkpoint(checkpoint);
    const auto dir = require_out_dir(out);
    const numerics::FixedSpec spec{n, f};
    const auto q = lstm::quantize_params(ck.net.lstm, spec,
                                         ck.has_masks ? &ck.masks.x : nullptr,
                                         ck.has_masks ? &ck.masks.h : nullptr);
    lstm::save_model(q, (dir / "model.json").string());
    if (ck.has_masks)
        lstm::save_masks(ck.masks.x, ck.masks.h, (dir / "masks.json").string());
    copy_task_meta(checkpoint, dir);

    std::vector<std::string> primary = {"model.json", "task.json"};
    if (ck.has_masks) primary.push_back("masks.json");
    write_manifest(dir, "quantize", config_path, 0,
                   json{{"checkpoint", checkpoint}, {"n", n}, {"f", f}}, primary, {});
    std::cout << "quantized to Q" << (n - f) << "." << f << " (" << n << "-bit)\n";
    return 0;
}

// --------------------------------------------------------------------------
// build-image
// --------------------------------------------------------------------------

struct BuildImageArgs {
    std::string model;
    int r = 0, q = 1;
    int r_x = 0, r_h = 0;  // direct override of the per-matrix widths
    int w_addr = 8;
    double freq = 200.0;
    std::string out;
};

int cmd_build_image(const BuildImageArgs& a, const std::string& config_path) {
    const fs::path mp(a.model);
    const auto model = lstm::load_model((mp / "model.json").string());
    data_check(model.as_fixed.has_value(), "build-image: model must be quantized (storage=fixed)");
    lstm::FixedLstmParams params = *model.as_fixed;
    if (fs::exists(mp / "masks.json")) {
        pruning::DualMasks masks;
        lstm::load_masks((mp / "masks.json").string(), masks.x, masks.h);
        for (int g = 0; g < 4; ++g) {
            params.w_x[g].mask = masks.x[g];
            params.w_h[g].mask = masks.h[g];
        }
    }

    // stored entries per row, from the first gate matrix
    const auto probe_x = sparse::encode_row_balanced(params.w_x[0]);
    const auto probe_h = sparse::encode_row_balanced(params.w_h[0]);
    int r_x = a.r_x, r_h = a.r_h;
    if (r_x == 0 || r_h == 0) {
        const int r_total = a.r > 0 ? a.r : std::max(2, probe_x.k + probe_h.k);
        const auto cfg = accel::configure(params.dims, probe_x.k, probe_h.k, r_total, a.q,
                                          a.freq, params.spec,
                                          static_cast<std::uint32_t>(a.w_addr));
        r_x = cfg.r_x;
        r_h = cfg.r_h;
    }

    const auto dir = require_out_dir(a.out);
    const auto img = sparse::build_memory_image(params, static_cast<std::uint32_t>(r_x),
                                                static_cast<std::uint32_t>(r_h),
                                                static_cast<std::uint32_t>(a.w_addr));
    sparse::write_image(img, (dir / "image.bin").string());

    json geom;
    geom["H"] = img.geo.hidden;
    geom["X"] = img.geo.input;
    geom["X_SP"] = img.geo.x_sp;
    geom["H_SP"] = img.geo.h_sp;
    geom["n"] = img.geo.n;
    geom["f"] = img.geo.f;
    geom["R_x"] = img.geo.r_x;
    geom["R_h"] = img.geo.r_h;
    geom["w_addr"] = img.geo.w_addr;
    geom["bits"] = {{"M_WX", img.bits_wx()}, {"M_WH", img.bits_wh()},
                    {"M_AdX", img.bits_adx()}, {"M_AdH", img.bits_adh()},
                    {"M_B", img.bits_b()}, {"M_C", img.bits_c()}};
    write_text_file(dir / "geometry.json", geom.dump(1));

    write_manifest(dir, "build-image", config_path, 0,
                   json{{"model", a.model}, {"r_x", r_x}, {"r_h", r_h}, {"w_addr", a.w_addr}},
                   {"image.bin", "geometry.json"}, {});
    std::cout << "image: X_SP=" << img.geo.x_sp << " H_SP=" << img.geo.h_sp << " R_x=" << r_x
              << " R_h=" << r_h << " -> " << (dir / "image.bin").string() << "\n";
    return 0;
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

struct SimulateArgs {
    std::string image;
    std::string input;
    int r = 0, q = 1;
    double freq = 200.0;
    double sparsity = -1.0;  // nominal OS; <0 = use model sparsity only
    std::string compare;
    std::string out;
};

json throughput_to_json(const accel::ThroughputReport& t) {
    json j;
    j["gops"] = t.gops;
    j["effective_gops"] = t.effective_gops;
    j["effective_gops_per_dsp"] = t.effective_per_dsp;
    j["effective_gops_per_lut"] = t.effective_per_lut;
    j["sparsity"] = t.sparsity;
    j["gops_per_w"] = "n/a";  // power not modeled
    return j;
}

std::string render_report(const accel::AccelConfig& cfg, const accel::CycleReport& cyc,
                          const accel::ThroughputReport& nominal,
                          const accel::ThroughputReport& actual,
                          const accel::ResourceEstimate& res, bool have_nominal,
                          const json* compare) {
    std::ostringstream ss;
    ss << std::left;
    const auto row = [&](const std::string& k, const std::string& v) {
        ss << "  " << std::setw(28) << k << v << "\n";
    };
    const auto num = [](double v) {
        std::ostringstream n;
        n << std::setprecision(6) << v;
        return n.str();
    };
    ss << "accelerator report\n";
    row("H x X", std::to_string(cfg.dims.hidden) + " x " + std::to_string(cfg.dims.input));
    row("X_SP / H_SP", std::to_string(cfg.x_sp) + " / " + std::to_string(cfg.h_sp));
    row("R_S / R_L / Q", std::to_string(cfg.r_small) + " / " + std::to_string(cfg.r_large) +
                             " / " + std::to_string(cfg.q));
    row("frequency (MHz)", num(cfg.freq_mhz));
    row("cycles/timestep", std::to_string(cyc.cycles_per_timestep));
    row("  gate (steady)", std::to_string(cyc.gate_cycles));
    row("  pipeline fill", std::to_string(cyc.fill_cycles));
    row("  function drain", std::to_string(cyc.function_cycles));
    row("MA utilization S/L", num(cyc.utilization_small) + " / " + num(cyc.utilization_large));
    row("ops/timestep (sparse)", std::to_string(cyc.ops_actual));
    row("ops/timestep (dense)", std::to_string(cyc.ops_dense));
    row("GOPS", num(actual.gops));
    if (have_nominal)
        row("effective GOPS (OS)", num(nominal.effective_gops) + "  (sparsity " +
                                       num(nominal.sparsity) + ")");
    row("effective GOPS (model)", num(actual.effective_gops) + "  (sparsity " +
                                      num(actual.sparsity) + ")");
    row("DSP", std::to_string(res.dsp_count));
    row("BRAM (36Kb)", std::to_string(res.bram_count));
    row("LUT estimate", std::to_string(res.lut_estimate));
    row("GOPS/W", "n/a (power not modeled)");
    if (compare) {
        ss << "deltas vs reference\n";
        const auto delta = [&](const char* key, double ours) {
            if (compare->contains(key)) {
                const double ref = (*compare)[key].get<double>();
                row(std::string(key),
                    num(ours) + " vs " + num(ref) + "  (" + num((ours - ref) / ref * 100.0) + "%)");
            }
        };
        delta("gops", actual.gops);
        delta("effective_gops", actual.effective_gops);
        delta("dsp", static_cast<double>(res.dsp_count));
        delta("bram", static_cast<double>(res.bram_count));
    }
    return ss.str();
}

int cmd_simulate(const SimulateArgs& a, const std::string& config_path) {
    const fs::path ip(a.image);
    const std::string image_file =
        fs::is_directory(ip) ? (ip / "image.bin").string() : ip.string();
    const auto img = sparse::read_image(image_file);
    const int r_total =
        a.r > 0 ? a.r : std::max(2u, img.geo.x_sp + img.geo.h_sp) * std::max(1, a.q);
    const auto cfg = accel::config_for_image(img, r_total, a.q, a.freq);
    const accel::Simulator sim(cfg, img);
    const auto spec = img.geo.spec();

    // input: {"x":[floats]} | {"x_raw":[ints]} | {"sequence":[[...],...]}
    std::ifstream in(a.input, std::ios::binary);
    data_check(in.good(), "simulate: cannot open input " + a.input);
    json jin;
    try {
        in >> jin;
    } catch (const json::exception& e) {
        throw DataError(std::string("simulate: bad input json: ") + e.what());
    }
    std::vector<lstm::FixedVec> steps;
    const auto quantize_step = [&](const json& arr) {
        data_check(arr.is_array() && arr.size() == img.geo.input,
                   "simulate: input length must equal X");
        lstm::FixedVec x(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i)
            x[i] = numerics::quantize_raw(arr[i].get<double>(), spec);
        return x;
    };
    if (jin.contains("x")) {
        steps.push_back(quantize_step(jin["x"]));
    } else if (jin.contains("x_raw")) {
        const auto& arr = jin["x_raw"];
        data_check(arr.is_array() && arr.size() == img.geo.input,
                   "simulate: input length must equal X");
        lstm::FixedVec x(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) x[i] = arr[i].get<std::int32_t>();
        steps.push_back(std::move(x));
    } else if (jin.contains("sequence")) {
        for (const auto& arr : jin["sequence"]) steps.push_back(quantize_step(arr));
    } else {
        throw DataError("simulate: input needs one of x, x_raw, sequence");
    }

    auto state = lstm::FixedLstmState::zeros(cfg.dims.hidden);
    accel::CycleReport cyc;
    json outputs = json::array();
    for (const auto& x : steps) {
        const auto res = sim.step(x, state);
        state = res.state;
        cyc = res.cycles;
        json step;
        step["h_raw"] = state.h;
        step["c_raw"] = state.c;
        step["h"] = lstm::dequantize_vec(state.h, spec);
        step["c"] = lstm::dequantize_vec(state.c, spec);
        outputs.push_back(std::move(step));
    }

    const auto res = accel::estimate_resources(cfg);
    const double actual_sparsity = accel::model_sparsity(cfg);
    const bool have_nominal = a.sparsity >= 0.0;
    const auto actual = accel::throughput_report(cfg, actual_sparsity, cyc.cycles_per_timestep);
    const auto nominal = have_nominal
                             ? accel::throughput_report(cfg, a.sparsity, cyc.cycles_per_timestep)
                             : actual;

    const auto dir = require_out_dir(a.out);
    json jout;
    jout["steps"] = std::move(outputs);
    write_text_file(dir / "outputs.json", jout.dump(1));

    json jcyc;
    jcyc["cycles_per_timestep"] = cyc.cycles_per_timestep;
    jcyc["breakdown"] = {{"gate", cyc.gate_cycles},
                         {"pipeline_fill", cyc.fill_cycles},
                         {"function_drain", cyc.function_cycles}};
    jcyc["utilization_small"] = cyc.utilization_small;
    jcyc["utilization_large"] = cyc.utilization_large;
    jcyc["ops_actual"] = cyc.ops_actual;
    jcyc["ops_dense"] = cyc.ops_dense;
    jcyc["timesteps_per_s"] = cfg.freq_mhz * 1e6 / static_cast<double>(cyc.cycles_per_timestep);
    write_text_file(dir / "cycle_report.json", jcyc.dump(1));

    json jthr;
    jthr["model"] = throughput_to_json(actual);
    if (have_nominal) jthr["nominal"] = throughput_to_json(nominal);
    write_text_file(dir / "throughput.json", jthr.dump(1));

    json jres;
    jres["dsp"] = res.dsp_count;
    jres["bram"] = res.bram_count;
    jres["lut"] = res.lut_estimate;
    jres["formula_trace"] = res.formula_trace;
    write_text_file(dir / "resources.json", jres.dump(1));

    json compare;
    const json* compare_ptr = nullptr;
    if (!a.compare.empty()) {
        std::ifstream cmp(a.compare, std::ios::binary);
        data_check(cmp.good(), "simulate: cannot open compare file " + a.compare);
        cmp >> compare;
        compare_ptr = &compare;
    }
    write_text_file(dir / "report.txt",
                    render_report(cfg, cyc, nominal, actual, res, have_nominal, compare_ptr));

    // activation tables for inspection
    std::ostringstream sig_csv, tanh_csv;
    numerics::write_pwl_csv(sim.sigmoid_table(), sig_csv);
    numerics::write_pwl_csv(sim.tanh_table(), tanh_csv);
    write_text_file(dir / "pwl_sigmoid.csv", sig_csv.str());
    write_text_file(dir / "pwl_tanh.csv", tanh_csv.str());

    write_manifest(dir, "simulate", config_path, 0,
                   json{{"image", image_file}, {"input", a.input}, {"r", r_total},
                        {"q", a.q}, {"freq", a.freq}, {"sparsity", a.sparsity}},
                   {"outputs.json", "cycle_report.json", "throughput.json", "resources.json",
                    "report.txt", "pwl_sigmoid.csv", "pwl_tanh.csv"},
                   {});
    std::cout << "simulated " << steps.size() << " step(s): " << cyc.cycles_per_timestep
              << " cycles/timestep, " << actual.gops << " GOPS (effective "
              << actual.effective_gops << ")\n";
    return 0;
}

// --------------------------------------------------------------------------
// report
// --------------------------------------------------------------------------

int cmd_report(const std::string& run_dir, const std::string& compare,
               const std::string& config_path) {
    const fs::path rp(run_dir);
    const auto read_json = [&](const char* name) {
        std::ifstream in(rp / name, std::ios::binary);
        data_check(in.good(), std::string("report: missing ") + name + " in " + run_dir);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw DataError(std::string("report: bad ") + name + ": " + e.what());
        }
        return j;
    };
    const json thr = read_json("throughput.json");
    const json cyc = read_json("cycle_report.json");
    const json res = read_json("resources.json");

    json merged;
    merged["throughput"] = thr;
    merged["cycles"] = cyc;
    merged["resources"] = {{"dsp", res["dsp"]}, {"bram", res["bram"]}, {"lut", res["lut"]}};
    if (!compare.empty()) {
        std::ifstream cmp(compare, std::ios::binary);
        data_check(cmp.good(), "report: cannot open compare file " + compare);
        json ref;
        cmp >> ref;
        json deltas;
        const auto add_delta = [&](const char* key, double ours) {
            if (ref.contains(key)) {
                const double r = ref[key].get<double>();
                deltas[key] = {{"ours", ours}, {"reference", r},
                               {"delta_pct", (ours - r) / r * 100.0}};
            }
        };
        add_delta("gops", thr["model"]["gops"].get<double>());
        add_delta("effective_gops", thr["model"]["effective_gops"].get<double>());
        add_delta("dsp", res["dsp"].get<double>());
        add_delta("bram", res["bram"].get<double>());
        merged["deltas"] = deltas;
    }
    write_text_file(rp / "report.json", merged.dump(1));

    std::ifstream txt(rp / "report.txt");
    if (txt.good()) std::cout << txt.rdbuf();
    if (merged.contains("deltas")) std::cout << merged["deltas"].dump(1) << "\n";

    write_manifest(rp, "report", config_path, 0, json{{"run", run_dir}, {"compare", compare}},
                   {"report.json"}, {});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"row-balanced dual-ratio sparse LSTM pipeline"};
    app.set_config("--config", "", "TOML-style config file ([subcommand] sections)");
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train an LSTM on a synthetic task");
    train->add_option("--task", train_args.task, "adding|parity|char_lm");
    train->add_option("--seed", train_args.data_seed, "dataset seed");
    train->add_option("--train-seed", train_args.train_seed, "init/shuffle seed");
    train->add_option("--hidden", train_args.hidden, "hidden size H");
    train->add_option("--train-n", train_args.train_n);
    train->add_option("--val-n", train_args.val_n);
    train->add_option("--test-n", train_args.test_n);
    train->add_option("--seq-len", train_args.seq_len, "0 = task default");
    train->add_option("--epochs", train_args.epochs);
    train->add_option("--batch", train_args.batch);
    train->add_option("--lr", train_args.lr);
    train->add_option("--clip", train_args.clip);
    train->add_option("--lr-decay", train_args.lr_decay);
    train->add_option("--out", train_args.out, "output directory")->required();

    std::string prune_checkpoint, prune_out;
    double prune_sx = 0.0, prune_sh = 0.0;
    auto* prune = app.add_subcommand("prune", "row-balanced dual-ratio pruning");
    prune->add_option("--checkpoint", prune_checkpoint)->required();
    prune->add_option("--spar-x", prune_sx, "percent")->required();
    prune->add_option("--spar-h", prune_sh, "percent")->required();
    prune->add_option("--out", prune_out)->required();

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "dual-ratio sparsity search with retraining");
    search->add_option("--checkpoint", search_args.checkpoint)->required();
    search->add_option("--os", search_args.os, "overall sparsity target, percent");
    search->add_option("--alpha", search_args.alpha, "ramp step");
    search->add_option("--delta-x", search_args.delta_x);
    search->add_option("--delta-h", search_args.delta_h);
    search->add_option("--nre", search_args.n_re, "retrain epochs per iteration");
    search->add_option("--lr", search_args.lr, "retrain learning rate");
    search->add_option("--out", search_args.out)->required();

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "accuracy curve over (Spar_x, Spar_h) pairs");
    sweep->add_option("--checkpoint", sweep_args.checkpoint)->required();
    sweep->add_option("--os", sweep_args.os);
    sweep->add_option("--step", sweep_args.step);
    sweep->add_option("--points", sweep_args.points, "grid points each side of uniform");
    sweep->add_option("--nre", sweep_args.n_re);
    sweep->add_option("--out", sweep_args.out)->required();

    std::string q_checkpoint, q_out;
    int q_n = 16, q_f = 12;
    auto* quant = app.add_subcommand("quantize", "convert a float checkpoint to fixed point");
    quant->add_option("--checkpoint", q_checkpoint)->required();
    quant->add_option("--n", q_n, "total bits");
    quant->add_option("--f", q_f, "fraction bits");
    quant->add_option("--out", q_out)->required();

    BuildImageArgs bi_args;
    auto* build = app.add_subcommand("build-image", "lay out embedded weight memories");
    build->add_option("--model", bi_args.model, "quantized model directory")->required();
    build->add_option("--r", bi_args.r, "total multipliers (0 = one row per cycle)");
    build->add_option("--q", bi_args.q, "parallel module groups");
    build->add_option("--rx", bi_args.r_x, "override R_x");
    build->add_option("--rh", bi_args.r_h, "override R_h");
    build->add_option("--w-addr", bi_args.w_addr, "relative-address bits");
    build->add_option("--freq", bi_args.freq);
    build->add_option("--out", bi_args.out)->required();

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run time steps on the accelerator model");
    sim->add_option("--image", sim_args.image, "image.bin or its directory")->required();
    sim->add_option("--input", sim_args.input, "json with x | x_raw | sequence")->required();
    sim->add_option("--r", sim_args.r, "total multipliers (0 = auto)");
    sim->add_option("--q", sim_args.q);
    sim->add_option("--freq", sim_args.freq, "MHz");
    sim->add_option("--sparsity", sim_args.sparsity, "nominal OS in [0,1) for effective GOPS");
    sim->add_option("--compare", sim_args.compare, "reference numbers json");
    sim->add_option("--out", sim_args.out)->required();

    std::string report_run, report_compare;
    auto* report = app.add_subcommand("report", "merge and render simulation reports");
    report->add_option("--run", report_run, "simulate output directory")->required();
    report->add_option("--compare", report_compare, "reference numbers json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::string config_path;
        if (const auto* copt = app.get_config_ptr(); copt && copt->count() > 0)
            config_path = copt->as<std::string>();
        if (train->parsed()) return cmd_train(train_args, config_path);
        if (prune->parsed())
            return cmd_prune(prune_checkpoint, prune_sx, prune_sh, prune_out, config_path);
        if (search->parsed()) return cmd_search(search_args, config_path);
        if (sweep->parsed()) return cmd_sweep(sweep_args, config_path);
        if (quant->parsed()) return cmd_quantize(q_checkpoint, q_n, q_f, q_out, config_path);
        if (build->parsed()) return cmd_build_image(bi_args, config_path);
        if (sim->parsed()) return cmd_simulate(sim_args, config_path);
        if (report->parsed()) return cmd_report(report_run, report_compare, config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
