#include <string>

#include "volmoe/error.hpp"
#include "volmoe/evalharness.hpp"

namespace volmoe {

namespace {

constexpr int kRoleBaseline = 0;
constexpr int kRoleMixtureExpert = 1;

} // namespace

std::uint64_t training_stream_id(int fold_index, int role) {
    return 1000u + 2u * static_cast<std::uint64_t>(fold_index) + static_cast<std::uint64_t>(role);
}

FoldModels train_fold(const Dataset& ds, const FoldSpec& fold, int fold_index, const ExperimentConfig& cfg) {
    const int window = cfg.lstm.window;
    if (fold.train.first != 1 || fold.train.last > ds.config.days || fold.train.length() < window + 1) {
        throw Error(ErrorKind::Config, "fold " + std::to_string(fold_index) + " has " +
                                           std::to_string(fold.train.length()) + " training days; need at least " +
                                           std::to_string(window + 1));
    }

    FoldModels models;
    models.fold = fold;
    models.index = fold_index;
    models.gate = cfg.gate;
    models.standardizers.reserve(ds.companies.size());
    for (const auto& s : ds.series) {
        models.standardizers.push_back(Standardizer::fit(s.slice(fold.train.first, fold.train.last)));
    }

    std::vector<WindowedSample> pooled;
    std::vector<WindowedSample> volatile_pool;
    std::vector<LinearRow> rows;
    rows.reserve(ds.companies.size() * static_cast<std::size_t>(fold.train.length()));
    for (std::size_t c = 0; c < ds.companies.size(); ++c) {
        const auto& company = ds.companies[c];
        const auto& series = ds.series[c];
        auto windows = make_windows(series, fold.train, models.standardizers[c], window);
        if (company.cls == VolatilityClass::Volatile) {
            volatile_pool.insert(volatile_pool.end(), windows.samples.begin(), windows.samples.end());
        }
        pooled.insert(pooled.end(), std::make_move_iterator(windows.samples.begin()),
                      std::make_move_iterator(windows.samples.end()));
        for (int day = fold.train.first; day <= fold.train.last; ++day) {
            rows.push_back(LinearRow{static_cast<double>(day), company.sigma, series.at_day(day)});
        }
    }

    const TrainConfig tc = cfg.lstm.train_config();
    auto baseline_rng = rng_new(cfg.seeds.shuffle_seed, training_stream_id(fold_index, kRoleBaseline));
    models.rnn = train(pooled, tc, baseline_rng);

    if (cfg.moe_rnn_pool == MoeRnnPool::Volatile) {
        if (volatile_pool.empty()) {
            models.gate.weights_volatile = GateWeights{0.0, 1.0};
            models.gate.weights_stable = GateWeights{0.0, 1.0};
            models.warnings.push_back("fold " + std::to_string(fold_index) +
                                      ": no volatile companies to train the mixture's RNN expert; mixture falls "
                                      "back to the linear expert");
        } else {
            auto expert_rng = rng_new(cfg.seeds.shuffle_seed, training_stream_id(fold_index, kRoleMixtureExpert));
            models.moe_rnn = train(volatile_pool, tc, expert_rng);
        }
    }

    models.linear = fit_linear(rows);
    return models;
}

DayPrediction predict_day(const FoldModels& models, const Dataset& ds, std::size_t company_index, int day,
                          int window) {
    const auto& series = ds.series.at(company_index);
    const auto history = series.slice(day - window, day - 1);
    const auto& standardizer = models.standardizers.at(company_index);
    DayPrediction out;
    out.y_rnn = predict_next(models.rnn.params, history, standardizer);
    out.moe = predict_company(RnnExpertView{models.mixture_rnn_params(), standardizer}, models.linear,
                              ds.companies[company_index], history, day, models.gate);
    return out;
}

ExperimentResult run_experiment(const Dataset& ds, const ExperimentConfig& cfg) {
    cfg.validate();
    ds.validate();
    const int total_days = ds.series.front().days();
    const auto folds = walk_forward_splits(total_days, cfg.walkforward.init_train, cfg.walkforward.val_len,
                                           cfg.walkforward.step);

    ExperimentResult result;
    result.report.config = cfg;
    result.report.master_seed = ds.master_seed;
    result.report.folds = folds;

    bool any_stable = false;
    bool any_volatile = false;
    for (const auto& c : ds.companies) {
        (c.cls == VolatilityClass::Volatile ? any_volatile : any_stable) = true;
    }
    if (!any_stable) {
        result.report.warnings.push_back("dataset has no stable companies; stable cells are omitted");
    }
    if (!any_volatile) {
        result.report.warnings.push_back("dataset has no volatile companies; volatile cells are omitted");
    }

    for (std::size_t k = 0; k < folds.size(); ++k) {
        const auto& fold = folds[k];
        auto models = train_fold(ds, fold, static_cast<int>(k), cfg);
        for (std::size_t c = 0; c < ds.companies.size(); ++c) {
            for (int day = fold.valid.first; day <= fold.valid.last; ++day) {
                const auto p = predict_day(models, ds, c, day, cfg.lstm.window);
                PredictionRecord rec;
                rec.company_id = ds.companies[c].id;
                rec.fold = static_cast<int>(k);
                rec.day = day;
                rec.actual = ds.series[c].at_day(day);
                rec.y_rnn = p.y_rnn;
                rec.y_lm = p.moe.y_lm;
                rec.y_moe = p.moe.y_moe;
                rec.y_rnn_expert = p.moe.y_rnn;
                rec.cls = ds.companies[c].cls;
                rec.days_ahead = day - fold.train.last;
                result.predictions.push_back(rec);
            }
        }
        result.report.linear_params.push_back(models.linear);
        result.report.warnings.insert(result.report.warnings.end(), models.warnings.begin(), models.warnings.end());
        result.models.push_back(std::move(models));
    }

    result.report.cells = aggregate_metrics(result.predictions, cfg.walkforward.trading_days_per_month);
    return result;
}

} // namespace volmoe
