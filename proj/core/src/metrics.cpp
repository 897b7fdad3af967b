#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "volmoe/error.hpp"
#include "volmoe/evalharness.hpp"

namespace volmoe {

namespace {

void check_pair(std::span<const double> preds, std::span<const double> actuals) {
    if (preds.empty() || preds.size() != actuals.size()) {
        throw Error(ErrorKind::Dimension, "metrics need equal non-empty inputs (got " + std::to_string(preds.size()) +
                                              " and " + std::to_string(actuals.size()) + ")");
    }
}

int horizon_rank(std::string_view label) {
    if (label == "1m") return 0;
    if (label == "6m") return 1;
    if (label == "12m") return 2;
    return 3;
}

} // namespace

double mse(std::span<const double> preds, std::span<const double> actuals) {
    check_pair(preds, actuals);
    Vector sq(preds.size());
    for (std::size_t k = 0; k < preds.size(); ++k) {
        const double r = preds[k] - actuals[k];
        sq[k] = r * r;
    }
    return pairwise_sum(sq) / static_cast<double>(preds.size());
}

double rmse(std::span<const double> preds, std::span<const double> actuals) {
    return std::sqrt(mse(preds, actuals));
}

double mae(std::span<const double> preds, std::span<const double> actuals) {
    check_pair(preds, actuals);
    Vector abs_err(preds.size());
    for (std::size_t k = 0; k < preds.size(); ++k) {
        abs_err[k] = std::abs(preds[k] - actuals[k]);
    }
    return pairwise_sum(abs_err) / static_cast<double>(preds.size());
}

std::string_view to_string(Model model) {
    switch (model) {
    case Model::Rnn: return "RNN";
    case Model::Linear: return "Linear";
    case Model::Moe: return "MoE";
    }
    return "?";
}

std::string_view to_string(ClassGroup group) {
    switch (group) {
    case ClassGroup::Stable: return "stable";
    case ClassGroup::Volatile: return "volatile";
    case ClassGroup::All: return "all";
    }
    return "?";
}

Model parse_model(std::string_view text) {
    for (Model m : kModels) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorKind::Parse, "unknown model '" + std::string(text) + "'");
}

ClassGroup parse_class_group(std::string_view text) {
    for (ClassGroup g : kClassGroups) {
        if (to_string(g) == text) return g;
    }
    throw Error(ErrorKind::Parse, "unknown class group '" + std::string(text) + "'");
}

double PredictionRecord::prediction(Model model) const noexcept {
    switch (model) {
    case Model::Rnn: return y_rnn;
    case Model::Linear: return y_lm;
    case Model::Moe: return y_moe;
    }
    return y_moe;
}

const MetricsCell* MetricsReport::find(Model model, ClassGroup group, std::string_view horizon) const {
    for (const auto& cell : cells) {
        if (cell.model == model && cell.group == group && cell.horizon == horizon) {
            return &cell;
        }
    }
    return nullptr;
}

std::vector<std::string> MetricsReport::horizons() const {
    std::vector<std::string> out;
    for (const auto& cell : cells) {
        if (std::find(out.begin(), out.end(), cell.horizon) == out.end()) {
            out.push_back(cell.horizon);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const std::string& a, const std::string& b) { return horizon_rank(a) < horizon_rank(b); });
    return out;
}

std::vector<MetricsCell> aggregate_metrics(std::span<const PredictionRecord> records, int trading_days_per_month) {
    // (group, horizon rank) -> record indices, in record order.
    std::map<std::tuple<int, int>, std::vector<std::size_t>> buckets;
    std::map<int, std::string> labels;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto label = horizon_bucket(records[k].days_ahead, trading_days_per_month);
        const int rank = horizon_rank(label);
        labels[rank] = label;
        const auto group = records[k].cls == VolatilityClass::Volatile ? ClassGroup::Volatile : ClassGroup::Stable;
        buckets[{static_cast<int>(group), rank}].push_back(k);
        buckets[{static_cast<int>(ClassGroup::All), rank}].push_back(k);
    }

    std::vector<MetricsCell> cells;
    for (Model model : kModels) {
        for (ClassGroup group : kClassGroups) {
            for (const auto& [rank, label] : labels) {
                const auto it = buckets.find({static_cast<int>(group), rank});
                if (it == buckets.end() || it->second.empty()) {
                    continue;
                }
                Vector preds;
                Vector actuals;
                preds.reserve(it->second.size());
                actuals.reserve(it->second.size());
                for (std::size_t idx : it->second) {
                    preds.push_back(records[idx].prediction(model));
                    actuals.push_back(records[idx].actual);
                }
                MetricsCell cell;
                cell.model = model;
                cell.group = group;
                cell.horizon = label;
                cell.n = preds.size();
                cell.mse = mse(preds, actuals);
                cell.rmse = std::sqrt(cell.mse);
                cell.mae = mae(preds, actuals);
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

} // namespace volmoe
