#pragma once

// Single-layer LSTM regressor with a dense scalar head.
//
//   f = sigmoid(W_f [h, x] + b_f)      i = sigmoid(W_i [h, x] + b_i)
//   g = tanh(W_C [h, x] + b_C)         o = sigmoid(W_o [h, x] + b_o)
//   C = f * C_prev + i * g             h = o * tanh(C)
//   prediction = w_out . h_last + b_out
//
// Gate matrices act on the concatenation [h_{t-1}, x_t] (hidden entries first).

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "volmoe/numkit.hpp"
#include "volmoe/simdata.hpp"

namespace volmoe {

inline constexpr std::size_t kParamBlockCount = 10;
inline constexpr std::array<std::string_view, kParamBlockCount> kParamBlockNames = {
    "w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o", "w_out", "b_out"};

struct LstmParams {
    std::size_t hidden = 0;
    std::size_t input = 0;
    Matrix w_f, w_i, w_c, w_o;
    Vector b_f, b_i, b_c, b_o;
    Vector w_out;
    double b_out = 0.0;

    static LstmParams zeros(std::size_t hidden, std::size_t input);

    [[nodiscard]] std::size_t parameter_count() const noexcept;
    /// Parameter blocks in declaration order (see kParamBlockNames).
    [[nodiscard]] std::array<std::span<double>, kParamBlockCount> blocks();
    [[nodiscard]] std::array<std::span<const double>, kParamBlockCount> blocks() const;

    [[nodiscard]] Vector flatten() const;
    void assign(std::span<const double> flat);

    /// Throws Dimension / NumericOverflow on inconsistent shapes or non-finite entries.
    void validate() const;

    friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

/// Gradients share the parameter layout.
using LstmGradients = LstmParams;

struct LstmState {
    Vector h;
    Vector c;

    static LstmState zeros(std::size_t hidden) { return {Vector(hidden, 0.0), Vector(hidden, 0.0)}; }
};

/// Everything the backward pass needs from one cell step.
struct StepCache {
    Vector z; ///< [h_prev, x]
    Vector f, i, g, o;
    Vector c_prev, c, tanh_c;
};

/// Flat per-step storage for a whole window; reused across calls by training.
struct SequenceCache {
    std::size_t steps = 0;
    std::size_t hidden = 0;
    std::size_t width = 0; ///< hidden + input
    Vector z;              ///< steps x width
    Vector f, i, g, o, c, tanh_c; ///< steps x hidden each
    Vector h_last;
    double prediction = 0.0;

    void reset(std::size_t steps, std::size_t hidden, std::size_t input);
};

/// Glorot-uniform gate blocks and head, zero biases except b_f = 1.
LstmParams init_params(std::size_t hidden, std::size_t input, RngStream& rng);

std::pair<LstmState, StepCache> cell_forward(const LstmParams& params, std::span<const double> x,
                                             const LstmState& state);

/// Runs the cell over `window` (steps x input values, step-major) from a zero state.
std::pair<double, SequenceCache> network_forward(const LstmParams& params, std::span<const double> window);

/// Same computation as network_forward, writing into a caller-owned cache.
double network_forward_into(const LstmParams& params, std::span<const double> window, SequenceCache& cache);

double mse_loss(std::span<const double> preds, std::span<const double> targets);

/// Exact gradient of the batch MSE (mean over samples) by backpropagation through time.
LstmGradients backward(const LstmParams& params, std::span<const SequenceCache> caches,
                       std::span<const double> targets);

/// Adds d(loss)/d(params) for one sample, given d(loss)/d(prediction), into `grads`.
void accumulate_gradient(const LstmParams& params, const SequenceCache& cache, double dpred, LstmGradients& grads);

/// Scales grads so their global L2 norm is at most max_norm; returns the norm before clipping.
double clip_global_norm(LstmGradients& grads, double max_norm);

struct AdamState {
    Vector m;
    Vector v;
    std::uint64_t t = 0;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_size(std::size_t n, double lr = 0.001, double beta1 = 0.9, double beta2 = 0.999,
                              double epsilon = 1e-8);
};

/// Adam with bias correction: p -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& opt);
void adam_step(LstmParams& params, const LstmGradients& grads, AdamState& opt);

struct WindowedSample {
    Vector input; ///< standardized prices for days target_day - window .. target_day - 1
    double target = 0.0;
    int company_id = 0;
    int target_day = 0;
};

struct WindowSet {
    std::vector<WindowedSample> samples;
    bool too_short = false; ///< range had fewer than window + 1 days
};

/// Stride-1 windows lying entirely inside `range`.
WindowSet make_windows(const PriceSeries& series, DayRange range, const Standardizer& standardizer, int window);

struct TrainConfig {
    int epochs = 50;
    int batch_size = 16;
    double lr = 0.001;
    int patience = 5;
    double val_fraction = 0.1;
    double min_delta = 1e-6;
    double clip_norm = 5.0;
    std::size_t hidden = 50;

    void validate() const;
    /// FNV-1a over a canonical rendering of every field.
    [[nodiscard]] std::uint64_t hash() const;
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_loss = 0.0; ///< equals train_loss when there is no holdout
    double monitored = 0.0;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0; ///< 1-based
    double best_monitored = 0.0;
    bool stopped_early = false;
    std::size_t train_count = 0;
    std::size_t holdout_count = 0;

    friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
    LstmParams params;
    TrainHistory history;
};

/// Initializes from `rng`, carves a shuffled holdout of val_fraction, runs
/// mini-batch Adam with early stopping and returns the best-epoch weights.
TrainResult train(std::span<const WindowedSample> samples, const TrainConfig& cfg, RngStream& rng);

/// Standardize, forward, de-standardize. Returns price units.
double predict_next(const LstmParams& params, std::span<const double> last_prices, const Standardizer& standardizer);

struct Checkpoint {
    LstmParams params;
    int window = 0;
    std::uint64_t config_hash = 0;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace volmoe
