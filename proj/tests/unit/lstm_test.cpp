#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "gradient_check.hpp"
#include "reference_lstm.hpp"
#include "volmoe/error.hpp"
#include "volmoe/lstm.hpp"

using namespace volmoe;
using volmoe::testing::check_gradients;
using volmoe::testing::random_params;
using volmoe::testing::random_vector;
using volmoe::testing::reference_cell;
using volmoe::testing::reference_network;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected a volmoe::Error";
    return ErrorKind::Io;
}

} // namespace

TEST(InitParams, ShapesBoundsAndForgetBias) {
    auto rng = rng_new(42, 0);
    const auto p = init_params(50, 1, rng);
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(p.w_f.rows(), 50u);
    EXPECT_EQ(p.w_f.cols(), 51u);
    EXPECT_EQ(p.w_out.size(), 50u);
    EXPECT_EQ(p.parameter_count(), 4u * 50 * 51 + 4u * 50 + 50 + 1);

    const double gate_bound = std::sqrt(6.0 / (51.0 + 50.0));
    for (const Matrix* w : {&p.w_f, &p.w_i, &p.w_c, &p.w_o}) {
        for (double x : w->values()) {
            ASSERT_LE(std::abs(x), gate_bound);
        }
    }
    const double head_bound = std::sqrt(6.0 / (50.0 + 1.0));
    for (double x : p.w_out) {
        ASSERT_LE(std::abs(x), head_bound);
    }
    for (std::size_t r = 0; r < 50; ++r) {
        EXPECT_EQ(p.b_f[r], 1.0);
        EXPECT_EQ(p.b_i[r], 0.0);
        EXPECT_EQ(p.b_c[r], 0.0);
        EXPECT_EQ(p.b_o[r], 0.0);
    }
    EXPECT_EQ(p.b_out, 0.0);
}

TEST(InitParams, DeterministicAndSmallShapes) {
    auto a = rng_new(9, 1);
    auto b = rng_new(9, 1);
    EXPECT_EQ(init_params(50, 1, a), init_params(50, 1, b));
    auto c = rng_new(9, 2);
    const auto small = init_params(4, 1, c);
    EXPECT_NO_THROW(small.validate());
    EXPECT_EQ(small.w_o.cols(), 5u);
}

TEST(LstmParams, FlattenAssignRoundTrip) {
    auto rng = rng_new(4, 4);
    const auto p = random_params(3, 2, rng);
    auto q = LstmParams::zeros(3, 2);
    q.assign(p.flatten());
    EXPECT_EQ(p, q);
    EXPECT_EQ(kind_of([&] { q.assign(Vector(5)); }), ErrorKind::Dimension);
}

TEST(LstmParams, ValidateRejectsBadEntries) {
    auto p = LstmParams::zeros(3, 1);
    p.b_o[1] = std::nan("");
    EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::NumericOverflow);
    p = LstmParams::zeros(3, 1);
    p.w_out.pop_back();
    EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::Dimension);
}

TEST(CellForward, ZeroWeightsHalfGates) {
    const auto p = LstmParams::zeros(3, 1);
    LstmState state{Vector{0.0, 0.0, 0.0}, Vector{2.0, -1.0, 0.4}};
    const std::vector<double> x{0.7};
    const auto [next, cache] = cell_forward(p, x, state);
    for (std::size_t r = 0; r < 3; ++r) {
        EXPECT_EQ(cache.f[r], 0.5);
        EXPECT_EQ(cache.i[r], 0.5);
        EXPECT_EQ(cache.o[r], 0.5);
        EXPECT_EQ(cache.g[r], 0.0);
        EXPECT_EQ(next.c[r], 0.5 * state.c[r]);
        EXPECT_EQ(next.h[r], 0.5 * std::tanh(0.5 * state.c[r]));
    }
}

TEST(CellForward, ZeroStateZeroWeightsGivesZeroHidden) {
    const auto p = LstmParams::zeros(4, 1);
    const auto [next, cache] = cell_forward(p, std::vector<double>{3.0}, LstmState::zeros(4));
    for (double h : next.h) {
        EXPECT_EQ(h, 0.0);
    }
}

TEST(CellForward, MatchesReferenceTranscription) {
    auto rng = rng_new(100, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_params(3, 2, rng, 1.0);
        const auto x = random_vector(2, rng);
        LstmState state{random_vector(3, rng, 0.9), random_vector(3, rng, 2.0)};
        const auto [next, cache] = cell_forward(p, x, state);
        const auto ref = reference_cell(p, x, state.h, state.c);
        for (std::size_t r = 0; r < 3; ++r) {
            EXPECT_NEAR(cache.f[r], ref.f[r], 1e-14);
            EXPECT_NEAR(cache.i[r], ref.i[r], 1e-14);
            EXPECT_NEAR(cache.g[r], ref.g[r], 1e-14);
            EXPECT_NEAR(cache.o[r], ref.o[r], 1e-14);
            EXPECT_NEAR(next.c[r], ref.c[r], 1e-14);
            EXPECT_NEAR(next.h[r], ref.h[r], 1e-14);
        }
    }
}

TEST(CellForward, GateRangesHoldForExtremeInputs) {
    auto rng = rng_new(101, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_params(4, 1, rng, 3.0);
        const std::vector<double> x{sample_uniform(rng, -50.0, 50.0)};
        LstmState state{random_vector(4, rng, 0.999), random_vector(4, rng, 20.0)};
        const auto [next, cache] = cell_forward(p, x, state);
        for (std::size_t r = 0; r < 4; ++r) {
            ASSERT_GE(cache.f[r], 0.0);
            ASSERT_LE(cache.f[r], 1.0);
            ASSERT_GE(cache.i[r], 0.0);
            ASSERT_LE(cache.i[r], 1.0);
            ASSERT_GE(cache.o[r], 0.0);
            ASSERT_LE(cache.o[r], 1.0);
            ASSERT_GE(cache.g[r], -1.0);
            ASSERT_LE(cache.g[r], 1.0);
            // tanh saturates to exactly 1 in double precision for huge cell states.
            ASSERT_LE(std::abs(next.h[r]), 1.0);
        }
    }
}

TEST(CellForward, HiddenStrictlyInsideUnitIntervalForModerateInputs) {
    auto rng = rng_new(102, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_params(4, 1, rng, 1.0);
        const std::vector<double> x{sample_uniform(rng, -3.0, 3.0)};
        LstmState state{random_vector(4, rng, 0.99), random_vector(4, rng, 3.0)};
        const auto [next, cache] = cell_forward(p, x, state);
        for (double h : next.h) {
            ASSERT_LT(std::abs(h), 1.0);
        }
    }
}

TEST(CellForward, NonFiniteInputIsOverflow) {
    auto rng = rng_new(1, 1);
    const auto p = random_params(2, 1, rng);
    EXPECT_EQ(kind_of([&] { cell_forward(p, std::vector<double>{std::nan("")}, LstmState::zeros(2)); }),
              ErrorKind::NumericOverflow);
    EXPECT_EQ(kind_of([&] { cell_forward(p, std::vector<double>{1.0, 2.0}, LstmState::zeros(2)); }),
              ErrorKind::Dimension);
}

TEST(NetworkForward, ZeroNetworkAndConstantHead) {
    auto p = LstmParams::zeros(5, 1);
    const std::vector<double> window{0.3, -1.0, 2.0, 0.0, 4.0};
    EXPECT_EQ(network_forward(p, window).first, 0.0);

    auto rng = rng_new(2, 2);
    p = random_params(5, 1, rng);
    std::fill(p.w_out.begin(), p.w_out.end(), 0.0);
    p.b_out = 3.5;
    EXPECT_EQ(network_forward(p, window).first, 3.5);
}

TEST(NetworkForward, MatchesUnrolledReference) {
    auto rng = rng_new(2024, 7);
    const auto p = random_params(4, 1, rng);
    const std::vector<double> ones(10, 1.0);
    EXPECT_NEAR(network_forward(p, ones).first, reference_network(p, ones), 1e-13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = random_vector(3 + rng.next_below(8), rng, 2.0);
        ASSERT_NEAR(network_forward(p, w).first, reference_network(p, w), 1e-13);
    }
}

TEST(NetworkForward, IntoReusesCacheWithSameResult) {
    auto rng = rng_new(5, 0);
    const auto p = random_params(3, 1, rng);
    SequenceCache cache;
    const auto a = random_vector(6, rng);
    const auto b = random_vector(4, rng);
    EXPECT_EQ(network_forward_into(p, a, cache), network_forward(p, a).first);
    EXPECT_EQ(network_forward_into(p, b, cache), network_forward(p, b).first);
    EXPECT_EQ(cache.steps, 4u);
}

TEST(MseLoss, HandValues) {
    EXPECT_EQ(mse_loss(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}), 0.0);
    EXPECT_EQ(mse_loss(std::vector<double>{2.0, 2.0}, std::vector<double>{0.0, 2.0}), 2.0);
    EXPECT_EQ(mse_loss(std::vector<double>{1.0}, std::vector<double>{4.0}), 9.0);
    EXPECT_EQ(kind_of([] { mse_loss(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}); }),
              ErrorKind::Dimension);
    EXPECT_EQ(kind_of([] { mse_loss(std::vector<double>{}, std::vector<double>{}); }), ErrorKind::Dimension);
}

TEST(MseLoss, NonNegativeAndZeroOnlyOnMatch) {
    auto rng = rng_new(8, 8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_vector(5, rng);
        auto b = a;
        EXPECT_EQ(mse_loss(a, b), 0.0);
        b[rng.next_below(5)] += 1e-3;
        EXPECT_GT(mse_loss(a, b), 0.0);
    }
}

TEST(Backward, ZeroResidualGivesZeroGradient) {
    auto rng = rng_new(6, 6);
    const auto p = random_params(4, 1, rng);
    std::vector<SequenceCache> caches;
    std::vector<double> targets;
    for (int s = 0; s < 3; ++s) {
        auto [pred, cache] = network_forward(p, random_vector(5, rng));
        targets.push_back(pred);
        caches.push_back(std::move(cache));
    }
    for (double g : backward(p, caches, targets).flatten()) {
        EXPECT_EQ(g, 0.0);
    }
}

TEST(Backward, MatchesFiniteDifferencesPinned) {
    auto rng = rng_new(77, 0);
    const auto p = random_params(4, 1, rng);
    const std::vector<std::vector<double>> windows{random_vector(5, rng), random_vector(5, rng)};
    const std::vector<double> targets{0.3, -0.8};
    const auto result = check_gradients(p, windows, targets);
    EXPECT_EQ(result.coordinates, p.parameter_count());
    EXPECT_EQ(result.failures, 0u) << result.first_failure << " worst " << result.worst_relative;
}

TEST(Backward, MatchesFiniteDifferencesRandomConfigurations) {
    auto rng = rng_new(78, 0);
    for (int trial = 0; trial < 24; ++trial) {
        const std::size_t hidden = 2 + rng.next_below(4);
        const std::size_t window = 3 + rng.next_below(4);
        const std::size_t batch = 1 + rng.next_below(3);
        const auto p = random_params(hidden, 1, rng);
        std::vector<std::vector<double>> windows;
        std::vector<double> targets;
        for (std::size_t s = 0; s < batch; ++s) {
            windows.push_back(random_vector(window, rng, 1.5));
            targets.push_back(sample_uniform(rng, -1.0, 1.0));
        }
        const auto result = check_gradients(p, windows, targets);
        ASSERT_EQ(result.failures, 0u) << "trial " << trial << " hidden " << hidden << " window " << window << ": "
                                       << result.first_failure;
    }
}

TEST(Backward, OutputBiasGradientIsLinearInResidual) {
    auto rng = rng_new(79, 0);
    const auto p = random_params(3, 1, rng);
    std::vector<SequenceCache> caches;
    std::vector<double> preds;
    for (int s = 0; s < 4; ++s) {
        auto [pred, cache] = network_forward(p, random_vector(4, rng));
        preds.push_back(pred);
        caches.push_back(std::move(cache));
    }
    std::vector<double> t1(4);
    std::vector<double> t2(4);
    for (std::size_t s = 0; s < 4; ++s) {
        const double r = sample_uniform(rng, -1.0, 1.0);
        t1[s] = preds[s] - r;
        t2[s] = preds[s] - 2.0 * r;
    }
    const double g1 = backward(p, caches, t1).b_out;
    const double g2 = backward(p, caches, t2).b_out;
    EXPECT_NEAR(g2, 2.0 * g1, 1e-12 * std::max(1.0, std::abs(g1)));
}

TEST(ClipGlobalNorm, ScalesOnlyAboveLimit) {
    auto g = LstmParams::zeros(1, 1);
    g.b_out = 3.0;
    g.w_out[0] = 4.0;
    EXPECT_EQ(clip_global_norm(g, 10.0), 5.0);
    EXPECT_EQ(g.b_out, 3.0);
    EXPECT_EQ(clip_global_norm(g, 1.0), 5.0);
    EXPECT_NEAR(g.b_out, 0.6, 1e-15);
    EXPECT_NEAR(g.w_out[0], 0.8, 1e-15);
}

TEST(Checkpoint, RoundTripReproducesPredictionsExactly) {
    auto rng = rng_new(31, 0);
    Checkpoint ckpt{random_params(6, 1, rng), 10, TrainConfig{}.hash()};
    std::stringstream buf;
    write_checkpoint(buf, ckpt);
    const auto back = read_checkpoint(buf);
    EXPECT_EQ(back.params, ckpt.params);
    EXPECT_EQ(back.window, 10);
    EXPECT_EQ(back.config_hash, ckpt.config_hash);
    const auto w = random_vector(10, rng);
    EXPECT_EQ(network_forward(back.params, w).first, network_forward(ckpt.params, w).first);
}

TEST(Checkpoint, FileRoundTripAndErrors) {
    auto rng = rng_new(32, 0);
    Checkpoint ckpt{random_params(2, 1, rng), 4, 0xdeadbeefULL};
    const auto path = std::filesystem::temp_directory_path() / "volmoe_lstm_test.ckpt";
    save_checkpoint(path, ckpt);
    EXPECT_EQ(load_checkpoint(path).params, ckpt.params);
    std::filesystem::remove(path);
    EXPECT_EQ(kind_of([&] { load_checkpoint(path); }), ErrorKind::Io);

    std::stringstream bad("not a checkpoint\n");
    EXPECT_EQ(kind_of([&] { read_checkpoint(bad); }), ErrorKind::Parse);

    std::stringstream full;
    write_checkpoint(full, ckpt);
    std::string text = full.str();
    std::stringstream truncated(text.substr(0, text.size() / 2));
    EXPECT_EQ(kind_of([&] { read_checkpoint(truncated); }), ErrorKind::Parse);
}

TEST(TrainConfig, HashSeparatesConfigs) {
    TrainConfig a;
    TrainConfig b;
    EXPECT_EQ(a.hash(), b.hash());
    b.lr = 0.002;
    EXPECT_NE(a.hash(), b.hash());
}
