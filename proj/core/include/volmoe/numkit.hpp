#pragma once

// Deterministic numeric substrate shared by every other module.
//
// Random streams: SplitMix64 (Steele, Lea & Flood) over a 64-bit state. The
// initial state of stream (seed, id) is
//     mix64(mix64(seed) ^ (id * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03))
// where mix64 is the SplitMix64 output finalizer. Uniform doubles take the top
// 53 bits of a draw. Normal draws use the Marsaglia polar form of Box-Muller;
// the second variate of each accepted pair is cached and returned by the next
// call. Golden values in the tests depend on all of the above.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace volmoe {

using Vector = std::vector<double>;

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double next_unit();
    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t next_below(std::uint64_t bound);
    /// Standard normal variate (polar Box-Muller).
    double next_standard_normal();

    [[nodiscard]] std::uint64_t state() const noexcept { return state_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    std::uint64_t state_;
    std::uint64_t stream_id_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

RngStream rng_new(std::uint64_t master_seed, std::uint64_t stream_id);

std::uint64_t mix64(std::uint64_t z) noexcept;

/// One draw from N(mean, stddev^2). stddev == 0 returns mean exactly and
/// leaves the stream untouched.
double sample_normal(RngStream& rng, double mean, double stddev);

double sample_uniform(RngStream& rng, double lo, double hi);

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void shuffle(std::span<T> items, RngStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Affine map to zero mean / unit variance. Population (divide-by-n) stddev.
class Standardizer {
public:
    Standardizer(double mean, double stddev);

    static Standardizer fit(std::span<const double> values);

    [[nodiscard]] double apply(double x) const noexcept { return (x - mean_) / stddev_; }
    [[nodiscard]] double invert(double z) const noexcept { return z * stddev_ + mean_; }
    [[nodiscard]] Vector apply(std::span<const double> xs) const;
    [[nodiscard]] Vector invert(std::span<const double> zs) const;

    [[nodiscard]] double mean() const noexcept { return mean_; }
    [[nodiscard]] double stddev() const noexcept { return stddev_; }

    friend bool operator==(const Standardizer&, const Standardizer&) = default;

private:
    double mean_;
    double stddev_;
};

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    static Matrix identity(std::size_t n);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Vector matvec(const Matrix& a, std::span<const double> x);

/// Relative pivot threshold below which a design is declared rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// argmin ||X b - y||_2 via Householder QR. Throws SingularSystem when any
/// |R_kk| < kRankTolerance * max_k |R_kk|.
Vector solve_least_squares(const Matrix& x, std::span<const double> y);

using ScalarField = std::function<double(std::span<const double>)>;

/// Central differences (f(t + h e_i) - f(t - h e_i)) / 2h for every coordinate.
Vector finite_diff_gradient(const ScalarField& f, std::span<const double> theta, double h);

/// Pairwise (cascade) summation; result depends only on the element order.
double pairwise_sum(std::span<const double> xs);

} // namespace volmoe
