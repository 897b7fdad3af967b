#include "volmoe/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volmoe/error.hpp"

namespace volmoe {

namespace {

double sigmoid(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Four independent partial sums; fixed association order keeps results reproducible.
double dot(const double* a, const double* b, std::size_t n) noexcept {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    for (; k < n; ++k) {
        s0 += a[k] * b[k];
    }
    return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
    for (std::size_t k = 0; k < n; ++k) {
        y[k] += alpha * x[k];
    }
}

struct StepOut {
    double* f;
    double* i;
    double* g;
    double* o;
    double* c;
    double* tanh_c;
    double* h;
};

// z must already hold [h_prev, x].
void cell_step(const LstmParams& p, const double* z, const double* c_prev, const StepOut& out) {
    const std::size_t hidden = p.hidden;
    const std::size_t width = p.hidden + p.input;
    for (std::size_t r = 0; r < hidden; ++r) {
        const double af = p.b_f[r] + dot(p.w_f.row(r).data(), z, width);
        const double ai = p.b_i[r] + dot(p.w_i.row(r).data(), z, width);
        const double ag = p.b_c[r] + dot(p.w_c.row(r).data(), z, width);
        const double ao = p.b_o[r] + dot(p.w_o.row(r).data(), z, width);
        const double f = sigmoid(af);
        const double i = sigmoid(ai);
        const double g = std::tanh(ag);
        const double o = sigmoid(ao);
        const double c = f * c_prev[r] + i * g;
        const double tc = std::tanh(c);
        const double h = o * tc;
        if (!std::isfinite(c) || !std::isfinite(h)) {
            throw Error(ErrorKind::NumericOverflow, "non-finite LSTM cell state");
        }
        out.f[r] = f;
        out.i[r] = i;
        out.g[r] = g;
        out.o[r] = o;
        out.c[r] = c;
        out.tanh_c[r] = tc;
        out.h[r] = h;
    }
}

void check_window(const LstmParams& params, std::span<const double> window) {
    if (params.input == 0 || window.empty() || window.size() % params.input != 0) {
        throw Error(ErrorKind::Dimension, "window of " + std::to_string(window.size()) +
                                              " values does not divide into steps of " +
                                              std::to_string(params.input));
    }
}

} // namespace

LstmParams LstmParams::zeros(std::size_t hidden, std::size_t input) {
    LstmParams p;
    p.hidden = hidden;
    p.input = input;
    const std::size_t width = hidden + input;
    p.w_f = p.w_i = p.w_c = p.w_o = Matrix(hidden, width);
    p.b_f = p.b_i = p.b_c = p.b_o = Vector(hidden, 0.0);
    p.w_out = Vector(hidden, 0.0);
    p.b_out = 0.0;
    return p;
}

std::size_t LstmParams::parameter_count() const noexcept {
    return 4 * hidden * (hidden + input) + 4 * hidden + hidden + 1;
}

std::array<std::span<double>, kParamBlockCount> LstmParams::blocks() {
    return {w_f.values(), w_i.values(), w_c.values(), w_o.values(), std::span<double>(b_f), std::span<double>(b_i),
            std::span<double>(b_c), std::span<double>(b_o), std::span<double>(w_out), std::span<double>(&b_out, 1)};
}

std::array<std::span<const double>, kParamBlockCount> LstmParams::blocks() const {
    return {w_f.values(),
            w_i.values(),
            w_c.values(),
            w_o.values(),
            std::span<const double>(b_f),
            std::span<const double>(b_i),
            std::span<const double>(b_c),
            std::span<const double>(b_o),
            std::span<const double>(w_out),
            std::span<const double>(&b_out, 1)};
}

Vector LstmParams::flatten() const {
    Vector flat;
    flat.reserve(parameter_count());
    for (const auto block : blocks()) {
        flat.insert(flat.end(), block.begin(), block.end());
    }
    return flat;
}

void LstmParams::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw Error(ErrorKind::Dimension, "expected " + std::to_string(parameter_count()) + " parameters, got " +
                                              std::to_string(flat.size()));
    }
    std::size_t offset = 0;
    for (auto block : blocks()) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), block.size(), block.begin());
        offset += block.size();
    }
}

void LstmParams::validate() const {
    const std::size_t width = hidden + input;
    if (hidden == 0 || input == 0) {
        throw Error(ErrorKind::Dimension, "hidden and input sizes must be positive");
    }
    for (const Matrix* m : {&w_f, &w_i, &w_c, &w_o}) {
        if (m->rows() != hidden || m->cols() != width) {
            throw Error(ErrorKind::Dimension, "gate matrix is not hidden x (hidden + input)");
        }
    }
    for (const Vector* v : {&b_f, &b_i, &b_c, &b_o, &w_out}) {
        if (v->size() != hidden) {
            throw Error(ErrorKind::Dimension, "bias or head vector is not of hidden size");
        }
    }
    for (const auto block : blocks()) {
        if (!std::all_of(block.begin(), block.end(), [](double x) { return std::isfinite(x); })) {
            throw Error(ErrorKind::NumericOverflow, "non-finite parameter");
        }
    }
}

void SequenceCache::reset(std::size_t n_steps, std::size_t n_hidden, std::size_t n_input) {
    steps = n_steps;
    hidden = n_hidden;
    width = n_hidden + n_input;
    z.assign(steps * width, 0.0);
    for (Vector* v : {&f, &i, &g, &o, &c, &tanh_c}) {
        v->resize(steps * hidden);
    }
    h_last.resize(hidden);
    prediction = 0.0;
}

LstmParams init_params(std::size_t hidden, std::size_t input, RngStream& rng) {
    if (hidden == 0 || input == 0) {
        throw Error(ErrorKind::InvalidParameter, "init_params needs hidden >= 1 and input >= 1");
    }
    LstmParams p = LstmParams::zeros(hidden, input);
    const double gate_bound = std::sqrt(6.0 / static_cast<double>(hidden + input + hidden));
    for (Matrix* m : {&p.w_f, &p.w_i, &p.w_c, &p.w_o}) {
        for (double& w : m->values()) {
            w = sample_uniform(rng, -gate_bound, gate_bound);
        }
    }
    const double head_bound = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    for (double& w : p.w_out) {
        w = sample_uniform(rng, -head_bound, head_bound);
    }
    std::fill(p.b_f.begin(), p.b_f.end(), 1.0);
    return p;
}

std::pair<LstmState, StepCache> cell_forward(const LstmParams& params, std::span<const double> x,
                                             const LstmState& state) {
    if (x.size() != params.input || state.h.size() != params.hidden || state.c.size() != params.hidden) {
        throw Error(ErrorKind::Dimension, "cell_forward: input or state size mismatch");
    }
    const std::size_t hidden = params.hidden;
    StepCache cache;
    cache.z.resize(hidden + params.input);
    std::copy(state.h.begin(), state.h.end(), cache.z.begin());
    std::copy(x.begin(), x.end(), cache.z.begin() + static_cast<std::ptrdiff_t>(hidden));
    cache.c_prev = state.c;
    for (Vector* v : {&cache.f, &cache.i, &cache.g, &cache.o, &cache.c, &cache.tanh_c}) {
        v->resize(hidden);
    }
    LstmState next{Vector(hidden), Vector(hidden)};
    cell_step(params, cache.z.data(), cache.c_prev.data(),
              StepOut{cache.f.data(), cache.i.data(), cache.g.data(), cache.o.data(), cache.c.data(),
                      cache.tanh_c.data(), next.h.data()});
    next.c = cache.c;
    return {std::move(next), std::move(cache)};
}

double network_forward_into(const LstmParams& params, std::span<const double> window, SequenceCache& cache) {
    check_window(params, window);
    const std::size_t hidden = params.hidden;
    const std::size_t input = params.input;
    const std::size_t steps = window.size() / input;
    cache.reset(steps, hidden, input);
    const Vector zero_c(hidden, 0.0);

    for (std::size_t t = 0; t < steps; ++t) {
        double* z = cache.z.data() + t * cache.width;
        std::copy_n(window.begin() + static_cast<std::ptrdiff_t>(t * input), input, z + hidden);
        // h_t lands directly in the next step's z, or in h_last for the final step.
        double* h_out = (t + 1 < steps) ? cache.z.data() + (t + 1) * cache.width : cache.h_last.data();
        const double* c_prev = t == 0 ? zero_c.data() : cache.c.data() + (t - 1) * hidden;
        const std::size_t off = t * hidden;
        cell_step(params, z, c_prev,
                  StepOut{cache.f.data() + off, cache.i.data() + off, cache.g.data() + off, cache.o.data() + off,
                          cache.c.data() + off, cache.tanh_c.data() + off, h_out});
    }
    cache.prediction = dot(params.w_out.data(), cache.h_last.data(), hidden) + params.b_out;
    return cache.prediction;
}

std::pair<double, SequenceCache> network_forward(const LstmParams& params, std::span<const double> window) {
    SequenceCache cache;
    const double pred = network_forward_into(params, window, cache);
    return {pred, std::move(cache)};
}

double mse_loss(std::span<const double> preds, std::span<const double> targets) {
    if (preds.empty() || preds.size() != targets.size()) {
        throw Error(ErrorKind::Dimension, "mse_loss needs equal non-empty inputs");
    }
    Vector sq(preds.size());
    for (std::size_t k = 0; k < preds.size(); ++k) {
        const double r = preds[k] - targets[k];
        sq[k] = r * r;
    }
    return pairwise_sum(sq) / static_cast<double>(preds.size());
}

void accumulate_gradient(const LstmParams& params, const SequenceCache& cache, double dpred, LstmGradients& grads) {
    const std::size_t hidden = params.hidden;
    const std::size_t width = cache.width;

    axpy(dpred, cache.h_last.data(), grads.w_out.data(), hidden);
    grads.b_out += dpred;

    Vector dh(hidden);
    Vector dc(hidden, 0.0);
    Vector dh_prev(hidden);
    Vector da_f(hidden), da_i(hidden), da_g(hidden), da_o(hidden);
    for (std::size_t r = 0; r < hidden; ++r) {
        dh[r] = dpred * params.w_out[r];
    }

    for (std::size_t t = cache.steps; t-- > 0;) {
        const std::size_t off = t * hidden;
        const double* f = cache.f.data() + off;
        const double* i = cache.i.data() + off;
        const double* g = cache.g.data() + off;
        const double* o = cache.o.data() + off;
        const double* tc = cache.tanh_c.data() + off;
        const double* c_prev = t == 0 ? nullptr : cache.c.data() + off - hidden;
        const double* z = cache.z.data() + t * width;

        for (std::size_t r = 0; r < hidden; ++r) {
            const double d_o = dh[r] * tc[r];
            dc[r] += dh[r] * o[r] * (1.0 - tc[r] * tc[r]);
            const double cp = c_prev ? c_prev[r] : 0.0;
            da_f[r] = dc[r] * cp * f[r] * (1.0 - f[r]);
            da_i[r] = dc[r] * g[r] * i[r] * (1.0 - i[r]);
            da_g[r] = dc[r] * i[r] * (1.0 - g[r] * g[r]);
            da_o[r] = d_o * o[r] * (1.0 - o[r]);
        }

        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        for (std::size_t r = 0; r < hidden; ++r) {
            axpy(da_f[r], z, grads.w_f.row(r).data(), width);
            axpy(da_i[r], z, grads.w_i.row(r).data(), width);
            axpy(da_g[r], z, grads.w_c.row(r).data(), width);
            axpy(da_o[r], z, grads.w_o.row(r).data(), width);
            grads.b_f[r] += da_f[r];
            grads.b_i[r] += da_i[r];
            grads.b_c[r] += da_g[r];
            grads.b_o[r] += da_o[r];
            if (t > 0) {
                axpy(da_f[r], params.w_f.row(r).data(), dh_prev.data(), hidden);
                axpy(da_i[r], params.w_i.row(r).data(), dh_prev.data(), hidden);
                axpy(da_g[r], params.w_c.row(r).data(), dh_prev.data(), hidden);
                axpy(da_o[r], params.w_o.row(r).data(), dh_prev.data(), hidden);
            }
        }
        for (std::size_t r = 0; r < hidden; ++r) {
            dc[r] *= f[r];
        }
        std::swap(dh, dh_prev);
    }
}

LstmGradients backward(const LstmParams& params, std::span<const SequenceCache> caches,
                       std::span<const double> targets) {
    if (caches.empty() || caches.size() != targets.size()) {
        throw Error(ErrorKind::Dimension, "backward needs one target per cache");
    }
    LstmGradients grads = LstmParams::zeros(params.hidden, params.input);
    const double scale = 2.0 / static_cast<double>(caches.size());
    for (std::size_t s = 0; s < caches.size(); ++s) {
        if (caches[s].hidden != params.hidden || caches[s].width != params.hidden + params.input) {
            throw Error(ErrorKind::Dimension, "cache shape does not match parameters");
        }
        accumulate_gradient(params, caches[s], scale * (caches[s].prediction - targets[s]), grads);
    }
    return grads;
}

double clip_global_norm(LstmGradients& grads, double max_norm) {
    double sum_sq = 0.0;
    for (const auto block : std::as_const(grads).blocks()) {
        for (double x : block) {
            sum_sq += x * x;
        }
    }
    const double norm = std::sqrt(sum_sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (auto block : grads.blocks()) {
            for (double& x : block) {
                x *= scale;
            }
        }
    }
    return norm;
}

WindowSet make_windows(const PriceSeries& series, DayRange range, const Standardizer& standardizer, int window) {
    if (window < 1) {
        throw Error(ErrorKind::InvalidParameter, "window must be >= 1");
    }
    if (range.first < 1 || range.last > series.days() || range.last < range.first) {
        throw Error(ErrorKind::InvalidParameter, "day range outside series");
    }
    WindowSet out;
    if (range.length() < window + 1) {
        out.too_short = true;
        return out;
    }
    out.samples.reserve(static_cast<std::size_t>(range.length() - window));
    for (int day = range.first + window; day <= range.last; ++day) {
        WindowedSample s;
        s.input = standardizer.apply(series.slice(day - window, day - 1));
        s.target = standardizer.apply(series.at_day(day));
        s.company_id = series.company_id;
        s.target_day = day;
        out.samples.push_back(std::move(s));
    }
    return out;
}

double predict_next(const LstmParams& params, std::span<const double> last_prices, const Standardizer& standardizer) {
    const Vector z = standardizer.apply(last_prices);
    SequenceCache cache;
    return standardizer.invert(network_forward_into(params, z, cache));
}

} // namespace volmoe
