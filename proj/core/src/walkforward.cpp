#include <string>

#include "volmoe/error.hpp"
#include "volmoe/evalharness.hpp"

namespace volmoe {

std::vector<FoldSpec> walk_forward_splits(int total_days, int init_train, int val_len, int step) {
    if (init_train < 1 || val_len < 1 || step < 1) {
        throw Error(ErrorKind::Config, "walkforward: init_train, val_len and step must be >= 1");
    }
    if (init_train + val_len > total_days) {
        throw Error(ErrorKind::Config, "walkforward: first validation window [" + std::to_string(init_train + 1) +
                                           ", " + std::to_string(init_train + val_len) + "] exceeds " +
                                           std::to_string(total_days) + " days");
    }
    std::vector<FoldSpec> folds;
    for (int train_end = init_train; train_end + val_len <= total_days; train_end += step) {
        folds.push_back(FoldSpec{DayRange{1, train_end}, DayRange{train_end + 1, train_end + val_len}});
    }
    return folds;
}

std::string horizon_bucket(int days_ahead, int trading_days_per_month) {
    if (days_ahead < 1 || trading_days_per_month < 1) {
        throw Error(ErrorKind::InvalidParameter, "horizon_bucket needs days_ahead >= 1");
    }
    if (days_ahead <= trading_days_per_month) return "1m";
    if (days_ahead <= 6 * trading_days_per_month) return "6m";
    if (days_ahead <= 12 * trading_days_per_month) return "12m";
    return "12m+";
}

} // namespace volmoe
