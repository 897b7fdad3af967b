#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "volmoe/numkit.hpp"

namespace volmoe {

enum class VolatilityClass { Stable, Volatile };

std::string_view to_string(VolatilityClass cls);
VolatilityClass parse_volatility_class(std::string_view text);

/// Volatile iff sigma > threshold (strict); the boundary itself is Stable.
VolatilityClass classify(double sigma, double threshold);

struct CompanyProfile {
    int id = 0;
    double mu = 0.0;
    double sigma = 0.0;
    VolatilityClass cls = VolatilityClass::Stable;

    friend bool operator==(const CompanyProfile&, const CompanyProfile&) = default;
};

/// Inclusive range of 1-based trading days.
struct DayRange {
    int first = 1;
    int last = 1;

    [[nodiscard]] int length() const noexcept { return last - first + 1; }
    [[nodiscard]] bool contains(int day) const noexcept { return day >= first && day <= last; }

    friend bool operator==(const DayRange&, const DayRange&) = default;
};

/// Daily prices for one company. Day t (1-based) lives at prices[t - 1].
struct PriceSeries {
    int company_id = 0;
    Vector prices;

    [[nodiscard]] int days() const noexcept { return static_cast<int>(prices.size()); }
    [[nodiscard]] double at_day(int day) const { return prices.at(static_cast<std::size_t>(day - 1)); }
    /// Prices for the inclusive day range [first, last].
    [[nodiscard]] std::span<const double> slice(int first, int last) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

struct DatasetConfig {
    int n_companies = 100;
    int days = 100;
    double mu = 0.05;
    double sigma_min = 0.01;
    double sigma_max = 0.15;
    double sigma_threshold = 0.05;
    double p0 = 100.0;

    /// Throws ErrorKind::Config naming the first offending field.
    void validate() const;

    friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

struct Dataset {
    DatasetConfig config;
    std::uint64_t master_seed = 0;
    std::vector<CompanyProfile> companies;
    std::vector<PriceSeries> series;

    /// Throws ErrorKind::Validation on any broken invariant.
    void validate() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// prices[1] = p0, prices[t] = prices[t-1] + mu + N(0, sigma) for t = 2..days.
PriceSeries generate_series(const CompanyProfile& profile, int days, double p0, RngStream& rng);

/// Company i draws sigma from stream i and its noise from stream n + i.
Dataset generate_dataset(const DatasetConfig& cfg, std::uint64_t master_seed);

// Long-format CSV: company_id,day,price,sigma,mu,class. Numbers are written in
// shortest round-trip form so import reproduces every double exactly.
inline constexpr std::string_view kDatasetCsvHeader = "company_id,day,price,sigma,mu,class";

void write_dataset_csv(const Dataset& ds, std::ostream& out);
void export_csv(const Dataset& ds, const std::filesystem::path& path);

/// The file does not carry the generator configuration, so the caller
/// supplies the snapshot it expects; company count, length and classes are
/// checked against it.
Dataset read_dataset_csv(std::istream& in, const DatasetConfig& cfg, std::uint64_t master_seed);
Dataset import_csv(const std::filesystem::path& path, const DatasetConfig& cfg, std::uint64_t master_seed);

} // namespace volmoe
