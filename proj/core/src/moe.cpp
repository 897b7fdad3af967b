#include "volmoe/moe.hpp"

#include <algorithm>
#include <cmath>

#include "volmoe/error.hpp"

namespace volmoe {

void GateWeights::validate() const {
    if (!(w_rnn >= 0.0) || !(w_lm >= 0.0) || std::abs(w_rnn + w_lm - 1.0) > 1e-12) {
        throw Error(ErrorKind::Config, "gate weights must be non-negative and sum to 1");
    }
}

void GateConfig::validate() const {
    weights_volatile.validate();
    weights_stable.validate();
    if (!(threshold >= 0.0)) {
        throw Error(ErrorKind::Config, "gate threshold must be >= 0");
    }
}

GateWeights gate_weights(VolatilityClass cls, const GateConfig& cfg) noexcept {
    return cls == VolatilityClass::Volatile ? cfg.weights_volatile : cfg.weights_stable;
}

double combine(const GateWeights& w, double y_rnn, double y_lm) noexcept {
    const double mixed = w.w_rnn * y_rnn + w.w_lm * y_lm;
    // Rounding in the weighted sum may step one ulp outside the expert interval.
    return std::clamp(mixed, std::min(y_rnn, y_lm), std::max(y_rnn, y_lm));
}

MoePrediction predict_company(const RnnExpertView& rnn, const LinearParams& linear, const CompanyProfile& company,
                              std::span<const double> window, int target_day, const GateConfig& cfg) {
    MoePrediction out;
    out.y_rnn = predict_next(rnn.params, window, rnn.standardizer);
    out.y_lm = predict_linear(linear, static_cast<double>(target_day), company.sigma);
    out.weights = gate_weights(company.cls, cfg);
    out.y_moe = combine(out.weights, out.y_rnn, out.y_lm);
    return out;
}

} // namespace volmoe
