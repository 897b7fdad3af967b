#pragma once

#include <span>

namespace volmoe {

/// price = beta0 + beta1 * day + beta2 * sigma
struct LinearParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;

    friend bool operator==(const LinearParams&, const LinearParams&) = default;
};

struct LinearRow {
    double day = 0.0;
    double sigma = 0.0;
    double price = 0.0;
};

/// Pooled OLS on the design [1, day, sigma]. Rows are put in a canonical order
/// first, so any permutation of the same rows gives bit-identical coefficients.
LinearParams fit_linear(std::span<const LinearRow> rows);

double predict_linear(const LinearParams& params, double day, double sigma) noexcept;

} // namespace volmoe
