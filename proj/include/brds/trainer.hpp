// trainer.hpp — desk-scale LSTM training with truncated BPTT and synthetic
// tasks that give the sparsity search a real accuracy signal.
//
// Training runs in double precision with plain SGD and global
// gradient-norm clipping; quantization happens downstream, after pruning
// and retraining. The LSTM feeds a linear readout (never pruned). Masked
// retraining zeroes gradients at pruned positions, so pruned weights stay
// exactly 0.0 through any number of epochs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brds/lstm.hpp"
#include "brds/pruning.hpp"

namespace brds::trainer {

enum class TaskKind { adding_problem, sequence_parity, char_lm };
enum class LossKind { mse, cross_entropy };

TaskKind task_kind_from_name(const std::string& name);
const char* task_kind_name(TaskKind kind);

struct Example {
    std::vector<Vec> inputs;        // seq_len x X
    Vec final_target;               // adding / parity
    std::vector<int> step_targets;  // char_lm: next-symbol ids
};

struct Task {
    TaskKind kind = TaskKind::adding_problem;
    LossKind loss = LossKind::mse;
    int input_dim = 2;    // X
    int output_dim = 1;   // readout width
    int seq_len = 20;
    std::uint64_t seed = 0;
    std::vector<Example> train, val, test;
};

struct TaskSizes {
    int train_n = 1024;
    int val_n = 256;
    int test_n = 256;
    int seq_len = 0;  // 0 = task default (adding 20, parity 16, char_lm 32)
};

inline constexpr int kCharLmVocab = 8;

Task generate_task(TaskKind kind, std::uint64_t seed, const TaskSizes& sizes = {});

// --------------------------------------------------------------------------
// Network = LSTM + linear readout
// --------------------------------------------------------------------------

struct Network {
    lstm::LstmParams lstm;
    Mat w_out;  // output_dim x H
    Vec b_out;  // output_dim
};

Network init_network(const lstm::LstmDims& dims, int output_dim, std::uint64_t seed);

struct TrainConfig {
    double lr = 0.1;
    int epochs = 50;
    int batch = 32;
    double clip = 5.0;       // global gradient-norm clip
    double lr_decay = 1.0;   // per-epoch multiplier
    std::uint64_t seed = 1;

    void validate() const {
        config_check(lr > 0.0 && epochs >= 0 && batch >= 1 && clip > 0.0 && lr_decay > 0.0,
                     "TrainConfig: hyperparameters must be positive");
    }
};

// Per-task presets that converge at desk scale (measured; the adding
// problem plateaus at the target variance below lr ~0.3).
TrainConfig default_config(TaskKind kind);

struct EpochRow {
    int epoch = 0;
    double train_loss = 0.0;
    double val_metric = 0.0;
    double wall_s = 0.0;  // measured epoch time (ept)
};

struct TrainResult {
    Network net;
    std::vector<EpochRow> log;
};

// Fresh training from a seeded initialization.
TrainResult train(const Task& task, const lstm::LstmDims& dims, const TrainConfig& cfg);

// Continue training an existing network; masks (optional) freeze pruned
// weights at zero. Identical seeds and schedules reproduce bitwise.
TrainResult train_network(const Network& start, const Task& task, const TrainConfig& cfg,
                          const pruning::DualMasks* masks = nullptr);

Network retrain_masked(const Network& net, const pruning::DualMasks& masks,
                       const Task& task, const TrainConfig& cfg);

// --------------------------------------------------------------------------
// Evaluation
// --------------------------------------------------------------------------

enum class Split { train, val, test };

struct EvalResult {
    double loss = 0.0;    // task loss (mse / bce / mean cross-entropy)
    double metric = 0.0;  // loss, accuracy, or perplexity by task
    double score = 0.0;   // higher is better; feeds the search

    pruning::EvalRecord record() const { return pruning::EvalRecord{loss, score}; }
};

EvalResult evaluate(const Network& net, const Task& task, Split split = Split::val);

// --------------------------------------------------------------------------
// Gradient access (BPTT); exposed for finite-difference checking
// --------------------------------------------------------------------------

struct NetGrads {
    std::array<Mat, 4> w_x, w_h;
    std::array<Vec, 4> b;
    Mat w_out;
    Vec b_out;

    static NetGrads zeros(const lstm::LstmDims& dims, int output_dim);
};

double batch_loss(const Network& net, const Task& task,
                  const std::vector<const Example*>& batch);
double batch_loss_and_grads(const Network& net, const Task& task,
                            const std::vector<const Example*>& batch, NetGrads& grads);

// --------------------------------------------------------------------------
// Checkpoint I/O: lstm model JSON + readout sidecar JSON
// --------------------------------------------------------------------------

void save_network(const Network& net, const std::string& model_path,
                  const std::string& sidecar_path, int epoch = 0);
Network load_network(const std::string& model_path, const std::string& sidecar_path);

// Task descriptor sidecar so later pipeline stages regenerate the same
// dataset: {"kind","seed","train_n","val_n","test_n","seq_len"}.
void save_task_meta(const Task& task, const TaskSizes& sizes, const std::string& path);
Task load_task_from_meta(const std::string& path);

void write_train_log_csv(const std::vector<EpochRow>& log, std::ostream& os);

} // namespace brds::trainer
