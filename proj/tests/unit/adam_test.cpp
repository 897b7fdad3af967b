#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "reference_lstm.hpp"
#include "volmoe/error.hpp"
#include "volmoe/lstm.hpp"

using namespace volmoe;

TEST(Adam, ZeroGradientLeavesParamsAndCountsStep) {
    std::vector<double> p{1.0, -2.0, 3.0};
    const std::vector<double> g(3, 0.0);
    auto opt = AdamState::for_size(3);
    adam_step(p, g, opt);
    EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.0}));
    EXPECT_EQ(opt.t, 1u);
    adam_step(p, g, opt);
    EXPECT_EQ(opt.t, 2u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    for (double g : {1e-3, 0.5, -2.0, 1e4}) {
        std::vector<double> p{0.0};
        auto opt = AdamState::for_size(1);
        adam_step(p, std::vector<double>{g}, opt);
        // m_hat = g and v_hat = g^2, so the step is lr * g / (|g| + eps).
        EXPECT_NEAR(p[0], -0.001 * g / (std::abs(g) + 1e-8), 1e-15);
        EXPECT_NEAR(std::abs(p[0]), 0.001, 1e-6);
        EXPECT_LT(p[0] * g, 0.0);
    }
}

TEST(Adam, ConstantGradientStepsDoNotGrow) {
    std::vector<double> p{0.0};
    auto opt = AdamState::for_size(1);
    const std::vector<double> g{0.3};
    adam_step(p, g, opt);
    const double d1 = p[0];
    adam_step(p, g, opt);
    const double d2 = p[0] - d1;
    EXPECT_LE(std::abs(d2), std::abs(d1) + 1e-9);
}

TEST(Adam, MatchesHandRecursion) {
    const std::vector<double> grads{0.5, -0.25, 1.0, 0.0, 2.0};
    std::vector<double> p{1.0};
    auto opt = AdamState::for_size(1, 0.01);
    double m = 0.0;
    double v = 0.0;
    double x = 1.0;
    for (std::size_t t = 1; t <= grads.size(); ++t) {
        const double g = grads[t - 1];
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double m_hat = m / (1.0 - std::pow(0.9, static_cast<double>(t)));
        const double v_hat = v / (1.0 - std::pow(0.999, static_cast<double>(t)));
        x -= 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8);
        adam_step(p, std::vector<double>{g}, opt);
        EXPECT_NEAR(p[0], x, 1e-15) << "step " << t;
        EXPECT_EQ(opt.t, t);
    }
}

TEST(Adam, SecondMomentStaysNonNegative) {
    auto rng = rng_new(3, 0);
    std::vector<double> p(20, 0.0);
    auto opt = AdamState::for_size(20);
    for (int step = 0; step < 100; ++step) {
        adam_step(p, volmoe::testing::random_vector(20, rng, 5.0), opt);
        for (double v : opt.v) {
            ASSERT_GE(v, 0.0);
        }
    }
    EXPECT_EQ(opt.t, 100u);
}

TEST(Adam, BlockwiseUpdateMatchesFlatUpdate) {
    auto rng = rng_new(4, 0);
    auto params = volmoe::testing::random_params(3, 1, rng);
    auto grads = volmoe::testing::random_params(3, 1, rng);
    auto flat = params.flatten();
    auto opt_blocks = AdamState::for_size(params.parameter_count());
    auto opt_flat = opt_blocks;
    for (int step = 0; step < 3; ++step) {
        adam_step(params, grads, opt_blocks);
        adam_step(flat, grads.flatten(), opt_flat);
    }
    EXPECT_EQ(params.flatten(), flat);
    EXPECT_EQ(opt_blocks.m, opt_flat.m);
}

TEST(Adam, ShapeMismatchIsDimensionError) {
    std::vector<double> p(3, 0.0);
    auto opt = AdamState::for_size(2);
    try {
        adam_step(p, std::vector<double>(3, 0.0), opt);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Dimension);
    }
}
