#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "volmoe/config.hpp"
#include "volmoe/linear_expert.hpp"
#include "volmoe/lstm.hpp"
#include "volmoe/moe.hpp"
#include "volmoe/simdata.hpp"

namespace volmoe {

struct FoldSpec {
    DayRange train;
    DayRange valid;

    friend bool operator==(const FoldSpec&, const FoldSpec&) = default;
};

/// Expanding-window folds: fold k trains on [1, init_train + k*step] and
/// validates on the next val_len days, emitted while validation fits in T.
std::vector<FoldSpec> walk_forward_splits(int total_days, int init_train, int val_len, int step);

double mse(std::span<const double> preds, std::span<const double> actuals);
double rmse(std::span<const double> preds, std::span<const double> actuals);
double mae(std::span<const double> preds, std::span<const double> actuals);

/// "1m" up to one month, "6m" up to six, "12m" up to twelve, "12m+" beyond.
std::string horizon_bucket(int days_ahead, int trading_days_per_month = 21);

enum class Model { Rnn, Linear, Moe };
enum class ClassGroup { Stable, Volatile, All };

inline constexpr Model kModels[] = {Model::Rnn, Model::Linear, Model::Moe};
inline constexpr ClassGroup kClassGroups[] = {ClassGroup::Stable, ClassGroup::Volatile, ClassGroup::All};

std::string_view to_string(Model model);
std::string_view to_string(ClassGroup group);
Model parse_model(std::string_view text);
ClassGroup parse_class_group(std::string_view text);

struct PredictionRecord {
    int company_id = 0;
    int fold = 0;
    int day = 0;
    double actual = 0.0;
    double y_rnn = 0.0;        ///< single pooled RNN baseline
    double y_lm = 0.0;         ///< linear expert
    double y_moe = 0.0;        ///< gated mixture
    double y_rnn_expert = 0.0; ///< RNN input the mixture actually used (not serialized)
    VolatilityClass cls = VolatilityClass::Stable;
    int days_ahead = 0;        ///< day minus the fold's last training day

    [[nodiscard]] double prediction(Model model) const noexcept;
};

struct MetricsCell {
    Model model = Model::Rnn;
    ClassGroup group = ClassGroup::All;
    std::string horizon;
    std::size_t n = 0;
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;

    friend bool operator==(const MetricsCell&, const MetricsCell&) = default;
};

struct MetricsReport {
    ExperimentConfig config;
    std::uint64_t master_seed = 0;
    std::vector<FoldSpec> folds;
    std::vector<LinearParams> linear_params; ///< one per fold
    std::vector<std::string> warnings;
    std::vector<MetricsCell> cells;

    [[nodiscard]] const MetricsCell* find(Model model, ClassGroup group, std::string_view horizon) const;
    /// Distinct horizon labels in report order.
    [[nodiscard]] std::vector<std::string> horizons() const;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Per (model, class group, horizon) metrics over the records; empty cells are omitted.
std::vector<MetricsCell> aggregate_metrics(std::span<const PredictionRecord> records, int trading_days_per_month);

/// Everything fitted for one fold, using only prices up to fold.train.last.
struct FoldModels {
    FoldSpec fold;
    int index = 0;
    std::vector<Standardizer> standardizers; ///< aligned with Dataset::companies
    TrainResult rnn;                         ///< pooled single-RNN baseline
    std::optional<TrainResult> moe_rnn;      ///< separate mixture expert (volatile pool)
    LinearParams linear;
    GateConfig gate; ///< effective gate after any degradation
    std::vector<std::string> warnings;

    [[nodiscard]] const LstmParams& mixture_rnn_params() const noexcept {
        return moe_rnn ? moe_rnn->params : rnn.params;
    }
};

/// Stream ids (under seeds.shuffle_seed) used to train each fold's networks.
std::uint64_t training_stream_id(int fold_index, int role);

FoldModels train_fold(const Dataset& ds, const FoldSpec& fold, int fold_index, const ExperimentConfig& cfg);

struct DayPrediction {
    double y_rnn = 0.0;
    MoePrediction moe;
};

/// One-step-ahead predictions for `day` from the true prices of the preceding window.
DayPrediction predict_day(const FoldModels& models, const Dataset& ds, std::size_t company_index, int day,
                          int window);

struct ExperimentResult {
    MetricsReport report;
    std::vector<PredictionRecord> predictions;
    std::vector<FoldModels> models;
};

ExperimentResult run_experiment(const Dataset& ds, const ExperimentConfig& cfg);

} // namespace volmoe
