#pragma once

#include <span>

#include "volmoe/linear_expert.hpp"
#include "volmoe/lstm.hpp"
#include "volmoe/numkit.hpp"
#include "volmoe/simdata.hpp"

namespace volmoe {

/// Convex mixing weights for the (RNN, linear) expert pair.
struct GateWeights {
    double w_rnn = 0.5;
    double w_lm = 0.5;

    /// Non-negative and summing to one within 1e-12; throws Config otherwise.
    void validate() const;

    friend bool operator==(const GateWeights&, const GateWeights&) = default;
};

/// Static, volatility-keyed gate. A learned gate would replace gate_weights()
/// behind the same configuration type.
struct GateConfig {
    GateWeights weights_volatile{0.7, 0.3};
    GateWeights weights_stable{0.3, 0.7};
    double threshold = 0.05;

    void validate() const;

    friend bool operator==(const GateConfig&, const GateConfig&) = default;
};

GateWeights gate_weights(VolatilityClass cls, const GateConfig& cfg) noexcept;

double combine(const GateWeights& w, double y_rnn, double y_lm) noexcept;

struct MoePrediction {
    double y_moe = 0.0;
    double y_rnn = 0.0;
    double y_lm = 0.0;
    GateWeights weights;
};

/// The RNN expert together with the per-company scaling it was trained under.
struct RnnExpertView {
    const LstmParams& params;
    const Standardizer& standardizer;
};

MoePrediction predict_company(const RnnExpertView& rnn, const LinearParams& linear, const CompanyProfile& company,
                              std::span<const double> window, int target_day, const GateConfig& cfg);

} // namespace volmoe
