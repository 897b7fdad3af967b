#include "volmoe/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volmoe/error.hpp"

namespace volmoe {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamOffset = 0xD1B54A32D192ED03ULL;

} // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : state_(mix64(mix64(master_seed) ^ (stream_id * kGolden + kStreamOffset))), stream_id_(stream_id) {}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) {
        throw Error(ErrorKind::InvalidParameter, "next_below requires a positive bound");
    }
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t draw = next_u64();
    while (draw >= limit) {
        draw = next_u64();
    }
    return draw % bound;
}

double RngStream::next_standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * next_unit() - 1.0;
        v = 2.0 * next_unit() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

RngStream rng_new(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RngStream(master_seed, stream_id);
}

double sample_normal(RngStream& rng, double mean, double stddev) {
    if (!(stddev >= 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "sample_normal: stddev must be >= 0, got " + std::to_string(stddev));
    }
    if (stddev == 0.0) {
        return mean;
    }
    return mean + stddev * rng.next_standard_normal();
}

double sample_uniform(RngStream& rng, double lo, double hi) {
    if (!(hi >= lo)) {
        throw Error(ErrorKind::InvalidParameter, "sample_uniform: empty interval");
    }
    return lo + (hi - lo) * rng.next_unit();
}

Standardizer::Standardizer(double mean, double stddev) : mean_(mean), stddev_(stddev) {
    if (!std::isfinite(mean) || !std::isfinite(stddev) || !(stddev > 0.0)) {
        throw Error(ErrorKind::DegenerateDistribution,
                    "standardizer needs finite mean and positive stddev, got stddev " + std::to_string(stddev));
    }
}

Standardizer Standardizer::fit(std::span<const double> values) {
    if (values.size() < 2) {
        throw Error(ErrorKind::DegenerateDistribution, "standardizer needs at least two values");
    }
    const auto n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    Vector sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
    const double var = pairwise_sum(sq) / n;
    if (!(var > 0.0)) {
        throw Error(ErrorKind::DegenerateDistribution, "standardizer input is constant");
    }
    return Standardizer(mean, std::sqrt(var));
}

Vector Standardizer::apply(std::span<const double> xs) const {
    Vector out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return apply(x); });
    return out;
}

Vector Standardizer::invert(std::span<const double> zs) const {
    Vector out(zs.size());
    std::transform(zs.begin(), zs.end(), out.begin(), [this](double z) { return invert(z); });
    return out;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) {
        throw Error(ErrorKind::Dimension, "matvec: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                                              std::to_string(x.size()) + " entries");
    }
    Vector out(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            acc += row[c] * x[c];
        }
        out[r] = acc;
    }
    return out;
}

Vector solve_least_squares(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) {
        throw Error(ErrorKind::Dimension, "least squares: design has " + std::to_string(n) + " rows, target has " +
                                              std::to_string(y.size()));
    }
    if (p == 0 || n < p) {
        throw Error(ErrorKind::Dimension, "least squares needs n >= p >= 1, got n=" + std::to_string(n) +
                                              " p=" + std::to_string(p));
    }

    Matrix a = x;
    Vector b(y.begin(), y.end());
    Vector diag(p, 0.0);
    Vector v(n);

    for (std::size_t k = 0; k < p; ++k) {
        double norm_sq = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            norm_sq += a(i, k) * a(i, k);
        }
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        const double alpha = a(k, k) > 0.0 ? -norm : norm;
        // Householder vector v = x - alpha e_1, applied as H = I - 2 v v^T / (v^T v).
        double vtv = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = a(i, k);
        }
        v[k] -= alpha;
        for (std::size_t i = k; i < n; ++i) {
            vtv += v[i] * v[i];
        }
        if (vtv > 0.0) {
            for (std::size_t j = k; j < p; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < n; ++i) {
                    dot += v[i] * a(i, j);
                }
                const double scale = 2.0 * dot / vtv;
                for (std::size_t i = k; i < n; ++i) {
                    a(i, j) -= scale * v[i];
                }
            }
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) {
                dot += v[i] * b[i];
            }
            const double scale = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) {
                b[i] -= scale * v[i];
            }
        }
        diag[k] = a(k, k);
    }

    double largest = 0.0;
    for (double d : diag) {
        largest = std::max(largest, std::abs(d));
    }
    for (std::size_t k = 0; k < p; ++k) {
        if (!(std::abs(diag[k]) >= kRankTolerance * largest) || largest == 0.0) {
            throw Error(ErrorKind::SingularSystem,
                        "least squares design is rank deficient (column " + std::to_string(k) + ")");
        }
    }

    Vector beta(p, 0.0);
    for (std::size_t kk = p; kk-- > 0;) {
        double acc = b[kk];
        for (std::size_t j = kk + 1; j < p; ++j) {
            acc -= a(kk, j) * beta[j];
        }
        beta[kk] = acc / a(kk, kk);
    }
    return beta;
}

Vector finite_diff_gradient(const ScalarField& f, std::span<const double> theta, double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "finite difference step must be positive");
    }
    Vector probe(theta.begin(), theta.end());
    Vector grad(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double original = probe[i];
        probe[i] = original + h;
        const double up = f(probe);
        probe[i] = original - h;
        const double down = f(probe);
        probe[i] = original;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double pairwise_sum(std::span<const double> xs) {
    constexpr std::size_t kBlock = 16;
    if (xs.size() <= kBlock) {
        double acc = 0.0;
        for (double x : xs) {
            acc += x;
        }
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace volmoe
