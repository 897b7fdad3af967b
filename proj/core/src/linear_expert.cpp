#include "volmoe/linear_expert.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "volmoe/error.hpp"
#include "volmoe/numkit.hpp"

namespace volmoe {

LinearParams fit_linear(std::span<const LinearRow> rows) {
    if (rows.size() < 3) {
        throw Error(ErrorKind::InvalidInput, "linear fit needs at least 3 rows, got " + std::to_string(rows.size()));
    }
    std::vector<LinearRow> sorted(rows.begin(), rows.end());
    for (const auto& r : sorted) {
        if (!std::isfinite(r.day) || !std::isfinite(r.sigma) || !std::isfinite(r.price)) {
            throw Error(ErrorKind::InvalidInput, "linear fit received a non-finite row");
        }
    }
    std::sort(sorted.begin(), sorted.end(), [](const LinearRow& a, const LinearRow& b) {
        return std::tie(a.day, a.sigma, a.price) < std::tie(b.day, b.sigma, b.price);
    });

    Matrix design(sorted.size(), 3);
    Vector target(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        design(k, 0) = 1.0;
        design(k, 1) = sorted[k].day;
        design(k, 2) = sorted[k].sigma;
        target[k] = sorted[k].price;
    }
    Vector beta;
    try {
        beta = solve_least_squares(design, target);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularSystem) {
            throw;
        }
        throw Error(ErrorKind::SingularSystem,
                    "linear expert design [1, day, sigma] is rank deficient; it needs at least two distinct days "
                    "and two distinct sigmas (drop the sigma column if every row shares one volatility)");
    }
    return LinearParams{beta[0], beta[1], beta[2]};
}

double predict_linear(const LinearParams& params, double day, double sigma) noexcept {
    return params.beta0 + params.beta1 * day + params.beta2 * sigma;
}

} // namespace volmoe
