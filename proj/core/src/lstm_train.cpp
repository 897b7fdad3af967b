#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "volmoe/error.hpp"
#include "volmoe/lstm.hpp"
#include "volmoe/textio.hpp"

namespace volmoe {

void TrainConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw Error(ErrorKind::Config, "lstm." + field + ": " + why);
    };
    if (epochs < 1) fail("epochs", "must be >= 1");
    if (batch_size < 1) fail("batch", "must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) fail("lr", "must be positive");
    if (patience < 1) fail("patience", "must be >= 1");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) fail("val_fraction", "must lie in [0, 1)");
    if (!(min_delta >= 0.0) || !std::isfinite(min_delta)) fail("min_delta", "must be >= 0");
    if (!(clip_norm >= 0.0) || !std::isfinite(clip_norm)) fail("clip_norm", "must be >= 0 (0 disables clipping)");
    if (hidden < 1) fail("hidden", "must be >= 1");
}

std::uint64_t TrainConfig::hash() const {
    const std::string canonical = "epochs=" + std::to_string(epochs) + ";batch=" + std::to_string(batch_size) +
                                  ";lr=" + textio::format_double(lr) + ";patience=" + std::to_string(patience) +
                                  ";val_fraction=" + textio::format_double(val_fraction) +
                                  ";min_delta=" + textio::format_double(min_delta) +
                                  ";clip_norm=" + textio::format_double(clip_norm) +
                                  ";hidden=" + std::to_string(hidden);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

double evaluate_loss(const LstmParams& params, std::span<const WindowedSample> samples,
                     std::span<const std::size_t> indices, SequenceCache& cache) {
    Vector sq(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto& s = samples[indices[k]];
        const double r = network_forward_into(params, s.input, cache) - s.target;
        sq[k] = r * r;
    }
    return pairwise_sum(sq) / static_cast<double>(indices.size());
}

} // namespace

TrainResult train(std::span<const WindowedSample> samples, const TrainConfig& cfg, RngStream& rng) {
    cfg.validate();
    if (samples.empty()) {
        throw Error(ErrorKind::InvalidInput, "train: no samples");
    }
    const std::size_t input_len = samples.front().input.size();
    for (const auto& s : samples) {
        if (s.input.size() != input_len || input_len == 0) {
            throw Error(ErrorKind::InvalidInput, "train: samples have differing window lengths");
        }
    }

    LstmParams params = init_params(cfg.hidden, 1, rng);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(order), rng);
    auto holdout_count = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(samples.size())));
    if (holdout_count >= samples.size()) {
        holdout_count = 0;
    }
    const std::vector<std::size_t> holdout(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout_count));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(holdout_count), order.end());

    AdamState opt = AdamState::for_size(params.parameter_count(), cfg.lr);
    LstmGradients grads = LstmParams::zeros(params.hidden, params.input);
    SequenceCache cache;
    Vector sq_errors;
    sq_errors.reserve(train_idx.size());

    TrainResult result{params, {}};
    result.history.train_count = train_idx.size();
    result.history.holdout_count = holdout_count;
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(std::span<std::size_t>(train_idx), rng);
        sq_errors.clear();
        for (std::size_t start = 0; start < train_idx.size(); start += batch) {
            const std::size_t stop = std::min(start + batch, train_idx.size());
            const double scale = 2.0 / static_cast<double>(stop - start);
            for (auto block : grads.blocks()) {
                std::fill(block.begin(), block.end(), 0.0);
            }
            for (std::size_t k = start; k < stop; ++k) {
                const auto& s = samples[train_idx[k]];
                const double residual = network_forward_into(params, s.input, cache) - s.target;
                sq_errors.push_back(residual * residual);
                accumulate_gradient(params, cache, scale * residual, grads);
            }
            clip_global_norm(grads, cfg.clip_norm);
            adam_step(params, grads, opt);
        }

        EpochRecord rec;
        rec.train_loss = pairwise_sum(sq_errors) / static_cast<double>(sq_errors.size());
        if (holdout_count > 0) {
            rec.val_loss = evaluate_loss(params, samples, holdout, cache);
            rec.monitored = rec.val_loss;
        } else {
            // Without a holdout, monitor the end-of-epoch loss of the weights we would return.
            rec.val_loss = rec.train_loss;
            rec.monitored = evaluate_loss(params, samples, train_idx, cache);
        }
        result.history.epochs.push_back(rec);

        if (rec.monitored < best - cfg.min_delta) {
            best = rec.monitored;
            result.params = params;
            result.history.best_epoch = epoch;
            result.history.best_monitored = best;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            result.history.stopped_early = true;
            break;
        }
    }
    return result;
}

} // namespace volmoe
