#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "volmoe/lstm.hpp"
#include "volmoe/moe.hpp"
#include "volmoe/simdata.hpp"

namespace volmoe {

struct LstmBlock {
    int window = 10;
    std::size_t hidden = 50;
    double lr = 0.001;
    int batch = 16;
    int epochs = 50;
    int patience = 5;
    double val_fraction = 0.1;
    double min_delta = 1e-6;
    double clip_norm = 5.0;

    [[nodiscard]] TrainConfig train_config() const;

    friend bool operator==(const LstmBlock&, const LstmBlock&) = default;
};

struct WalkForwardConfig {
    int init_train = 80;
    int val_len = 20;
    int step = 20;
    int trading_days_per_month = 21;

    friend bool operator==(const WalkForwardConfig&, const WalkForwardConfig&) = default;
};

/// Which companies' windows train the RNN expert inside the mixture.
enum class MoeRnnPool {
    All,      ///< reuse the pooled single-RNN baseline
    Volatile, ///< train a second LSTM on volatile companies only
};

std::string_view to_string(MoeRnnPool pool);

struct SeedsConfig {
    std::uint64_t master_seed = 42;
    std::uint64_t shuffle_seed = 1;

    friend bool operator==(const SeedsConfig&, const SeedsConfig&) = default;
};

struct OutputConfig {
    std::string dataset_csv = "dataset.csv";
    std::string out_dir = "results";

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    LstmBlock lstm;
    GateConfig gate;
    MoeRnnPool moe_rnn_pool = MoeRnnPool::All;
    WalkForwardConfig walkforward;
    SeedsConfig seeds;
    OutputConfig output;

    /// Throws Config naming the offending dotted key.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict JSON parsing: unknown keys and out-of-range values are rejected;
/// absent keys keep their defaults. gate.threshold always mirrors
/// dataset.sigma_threshold.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration as JSON text (stable key order).
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

} // namespace volmoe
