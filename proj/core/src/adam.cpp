#include "volmoe/lstm.hpp"

#include <cmath>

#include "volmoe/error.hpp"

namespace volmoe {

AdamState AdamState::for_size(std::size_t n, double lr, double beta1, double beta2, double epsilon) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

namespace {

void update_range(std::span<double> params, std::span<const double> grads, AdamState& opt, std::size_t offset,
                  double correction1, double correction2) {
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        double& m = opt.m[offset + k];
        double& v = opt.v[offset + k];
        m = opt.beta1 * m + (1.0 - opt.beta1) * g;
        v = opt.beta2 * v + (1.0 - opt.beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[k] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
}

} // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& opt) {
    if (params.size() != grads.size() || params.size() != opt.m.size() || params.size() != opt.v.size()) {
        throw Error(ErrorKind::Dimension, "adam_step: parameter, gradient and moment sizes differ");
    }
    ++opt.t;
    const auto t = static_cast<double>(opt.t);
    update_range(params, grads, opt, 0, 1.0 - std::pow(opt.beta1, t), 1.0 - std::pow(opt.beta2, t));
}

void adam_step(LstmParams& params, const LstmGradients& grads, AdamState& opt) {
    if (params.parameter_count() != opt.m.size() || grads.parameter_count() != opt.m.size() ||
        opt.v.size() != opt.m.size()) {
        throw Error(ErrorKind::Dimension, "adam_step: parameter, gradient and moment sizes differ");
    }
    ++opt.t;
    const auto t = static_cast<double>(opt.t);
    const double c1 = 1.0 - std::pow(opt.beta1, t);
    const double c2 = 1.0 - std::pow(opt.beta2, t);
    auto param_blocks = params.blocks();
    const auto grad_blocks = grads.blocks();
    std::size_t offset = 0;
    for (std::size_t b = 0; b < kParamBlockCount; ++b) {
        if (param_blocks[b].size() != grad_blocks[b].size()) {
            throw Error(ErrorKind::Dimension, "adam_step: block shape mismatch");
        }
        update_range(param_blocks[b], grad_blocks[b], opt, offset, c1, c2);
        offset += param_blocks[b].size();
    }
}

} // namespace volmoe
