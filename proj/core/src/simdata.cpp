#include "volmoe/simdata.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "volmoe/error.hpp"
#include "volmoe/textio.hpp"

namespace volmoe {

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) {
        throw Error(ErrorKind::Config, "dataset." + field + ": " + why);
    }
}

} // namespace

std::string_view to_string(VolatilityClass cls) {
    return cls == VolatilityClass::Volatile ? "volatile" : "stable";
}

VolatilityClass parse_volatility_class(std::string_view text) {
    if (text == "volatile") {
        return VolatilityClass::Volatile;
    }
    if (text == "stable") {
        return VolatilityClass::Stable;
    }
    throw Error(ErrorKind::Parse, "unknown volatility class '" + std::string(text) + "'");
}

VolatilityClass classify(double sigma, double threshold) {
    if (!(sigma >= 0.0) || !(threshold >= 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "classify: sigma and threshold must be non-negative");
    }
    return sigma > threshold ? VolatilityClass::Volatile : VolatilityClass::Stable;
}

std::span<const double> PriceSeries::slice(int first, int last) const {
    if (first < 1 || last < first || last > days()) {
        throw Error(ErrorKind::InvalidParameter, "day range [" + std::to_string(first) + ", " + std::to_string(last) +
                                                     "] outside series of " + std::to_string(days()) + " days");
    }
    return std::span<const double>(prices).subspan(static_cast<std::size_t>(first - 1),
                                                   static_cast<std::size_t>(last - first + 1));
}

void DatasetConfig::validate() const {
    require(n_companies >= 2, "n_companies", "must be >= 2");
    require(days >= 2, "days", "must be >= 2");
    require(std::isfinite(mu), "mu", "must be finite");
    require(std::isfinite(sigma_min) && sigma_min >= 0.0, "sigma_min", "must be finite and >= 0");
    require(std::isfinite(sigma_max) && sigma_max > 0.0, "sigma_max", "must be finite and > 0");
    require(sigma_max >= sigma_min, "sigma_max", "must be >= sigma_min");
    require(std::isfinite(sigma_threshold) && sigma_threshold >= 0.0, "sigma_threshold", "must be finite and >= 0");
    require(std::isfinite(p0), "p0", "must be finite");
}

void Dataset::validate() const {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::Validation, why); };
    if (companies.size() != series.size()) {
        fail("company and series counts differ");
    }
    if (companies.empty()) {
        fail("dataset has no companies");
    }
    const int length = series.front().days();
    if (length < 2) {
        fail("series must have at least two days");
    }
    std::map<int, int> seen;
    for (std::size_t i = 0; i < companies.size(); ++i) {
        const auto& c = companies[i];
        const auto& s = series[i];
        if (c.id != s.company_id) {
            fail("series " + std::to_string(i) + " is not aligned with company " + std::to_string(c.id));
        }
        if (++seen[c.id] > 1) {
            fail("duplicate company id " + std::to_string(c.id));
        }
        if (s.days() != length) {
            fail("company " + std::to_string(c.id) + " has " + std::to_string(s.days()) + " days, expected " +
                 std::to_string(length));
        }
        if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) {
            fail("company " + std::to_string(c.id) + " has invalid sigma");
        }
        if (classify(c.sigma, config.sigma_threshold) != c.cls) {
            fail("company " + std::to_string(c.id) + ": class '" + std::string(to_string(c.cls)) +
                 "' disagrees with sigma " + textio::format_double(c.sigma) + " at threshold " +
                 textio::format_double(config.sigma_threshold));
        }
        for (double p : s.prices) {
            if (!std::isfinite(p)) {
                fail("company " + std::to_string(c.id) + " has a non-finite price");
            }
        }
    }
}

PriceSeries generate_series(const CompanyProfile& profile, int days, double p0, RngStream& rng) {
    if (days < 2 || !std::isfinite(p0)) {
        throw Error(ErrorKind::InvalidParameter, "generate_series needs days >= 2 and finite p0");
    }
    PriceSeries out{profile.id, Vector(static_cast<std::size_t>(days))};
    // Same walk as prices[t-1] + mu + eps_t, but the drift is applied in closed
    // form so a noiseless series hits p0 + mu * (t - 1) exactly.
    out.prices[0] = p0;
    double noise = 0.0;
    for (std::size_t t = 1; t < out.prices.size(); ++t) {
        noise += sample_normal(rng, 0.0, profile.sigma);
        out.prices[t] = (p0 + profile.mu * static_cast<double>(t)) + noise;
    }
    return out;
}

Dataset generate_dataset(const DatasetConfig& cfg, std::uint64_t master_seed) {
    cfg.validate();
    Dataset ds;
    ds.config = cfg;
    ds.master_seed = master_seed;
    const auto n = static_cast<std::uint64_t>(cfg.n_companies);
    ds.companies.reserve(n);
    ds.series.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto sigma_rng = rng_new(master_seed, i);
        CompanyProfile profile;
        profile.id = static_cast<int>(i);
        profile.mu = cfg.mu;
        profile.sigma = sample_uniform(sigma_rng, cfg.sigma_min, cfg.sigma_max);
        profile.cls = classify(profile.sigma, cfg.sigma_threshold);

        auto noise_rng = rng_new(master_seed, n + i);
        ds.series.push_back(generate_series(profile, cfg.days, cfg.p0, noise_rng));
        ds.companies.push_back(profile);
    }
    return ds;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    out << kDatasetCsvHeader << '\n';
    for (std::size_t i = 0; i < ds.companies.size(); ++i) {
        const auto& c = ds.companies[i];
        const std::string sigma = textio::format_double(c.sigma);
        const std::string mu = textio::format_double(c.mu);
        const auto cls = to_string(c.cls);
        const auto& prices = ds.series[i].prices;
        for (std::size_t t = 0; t < prices.size(); ++t) {
            out << c.id << ',' << (t + 1) << ',' << textio::format_double(prices[t]) << ',' << sigma << ',' << mu
                << ',' << cls << '\n';
        }
    }
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    }
    write_dataset_csv(ds, out);
    out.flush();
    if (!out) {
        throw Error(ErrorKind::Io, "failed while writing '" + path.string() + "'");
    }
}

Dataset read_dataset_csv(std::istream& in, const DatasetConfig& cfg, std::uint64_t master_seed) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Parse, "line 1: missing header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kDatasetCsvHeader) {
        throw Error(ErrorKind::Parse, "line 1: expected header '" + std::string(kDatasetCsvHeader) + "'");
    }

    struct Pending {
        CompanyProfile profile;
        std::map<long long, double> prices;
    };
    std::map<int, Pending> by_company;

    long long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto bad = [&](const std::string& why) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + why);
        };
        const auto fields = textio::split(line, ',');
        if (fields.size() != 6) {
            bad("expected 6 columns, found " + std::to_string(fields.size()));
        }
        long long id = 0;
        long long day = 0;
        double price = 0.0;
        double sigma = 0.0;
        double mu = 0.0;
        if (!textio::parse_int(fields[0], id)) bad("bad company_id");
        if (!textio::parse_int(fields[1], day) || day < 1) bad("bad day");
        if (!textio::parse_double(fields[2], price)) bad("bad price");
        if (!textio::parse_double(fields[3], sigma)) bad("bad sigma");
        if (!textio::parse_double(fields[4], mu)) bad("bad mu");
        VolatilityClass cls{};
        try {
            cls = parse_volatility_class(fields[5]);
        } catch (const Error&) {
            bad("bad class '" + std::string(fields[5]) + "'");
        }

        auto [it, inserted] = by_company.try_emplace(static_cast<int>(id));
        auto& pending = it->second;
        if (inserted) {
            pending.profile = CompanyProfile{static_cast<int>(id), mu, sigma, cls};
        } else if (pending.profile.sigma != sigma || pending.profile.mu != mu || pending.profile.cls != cls) {
            throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ": company " +
                                                   std::to_string(id) + " changes its profile between rows");
        }
        if (!pending.prices.emplace(day, price).second) {
            throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ": duplicate day " +
                                                   std::to_string(day) + " for company " + std::to_string(id));
        }
    }

    Dataset ds;
    ds.config = cfg;
    ds.master_seed = master_seed;
    for (auto& [id, pending] : by_company) {
        PriceSeries s{id, {}};
        long long expected = 1;
        for (const auto& [day, price] : pending.prices) {
            if (day != expected) {
                throw Error(ErrorKind::Validation, "company " + std::to_string(id) + " is missing day " +
                                                       std::to_string(expected));
            }
            s.prices.push_back(price);
            ++expected;
        }
        ds.companies.push_back(pending.profile);
        ds.series.push_back(std::move(s));
    }
    if (static_cast<int>(ds.companies.size()) != cfg.n_companies) {
        throw Error(ErrorKind::Validation, "file has " + std::to_string(ds.companies.size()) +
                                               " companies, config expects " + std::to_string(cfg.n_companies));
    }
    if (!ds.series.empty() && ds.series.front().days() != cfg.days) {
        throw Error(ErrorKind::Validation, "file has " + std::to_string(ds.series.front().days()) +
                                               " days per company, config expects " + std::to_string(cfg.days));
    }
    ds.validate();
    return ds;
}

Dataset import_csv(const std::filesystem::path& path, const DatasetConfig& cfg, std::uint64_t master_seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open dataset '" + path.string() + "'");
    }
    return read_dataset_csv(in, cfg, master_seed);
}

} // namespace volmoe
