#include "volmoe/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json_internal.hpp"
#include "volmoe/error.hpp"
#include "volmoe/textio.hpp"

namespace volmoe {

using nlohmann::json;
using nlohmann::ordered_json;

std::string report_to_json(const MetricsReport& report) {
    ordered_json j;
    j["schema"] = "volmoe-report";
    j["schema_version"] = kReportSchemaVersion;
    j["master_seed"] = report.master_seed;
    j["config"] = detail::config_json(report.config);
    j["folds"] = ordered_json::array();
    for (std::size_t k = 0; k < report.folds.size(); ++k) {
        const auto& f = report.folds[k];
        j["folds"].push_back({{"index", k},
                              {"train", {f.train.first, f.train.last}},
                              {"valid", {f.valid.first, f.valid.last}}});
    }
    j["linear_params"] = ordered_json::array();
    for (std::size_t k = 0; k < report.linear_params.size(); ++k) {
        const auto& p = report.linear_params[k];
        j["linear_params"].push_back({{"fold", k}, {"beta0", p.beta0}, {"beta1", p.beta1}, {"beta2", p.beta2}});
    }
    j["warnings"] = report.warnings;
    j["cells"] = ordered_json::array();
    for (const auto& c : report.cells) {
        j["cells"].push_back({{"model", std::string(to_string(c.model))},
                              {"class", std::string(to_string(c.group))},
                              {"horizon", c.horizon},
                              {"n", c.n},
                              {"mse", c.mse},
                              {"rmse", c.rmse},
                              {"mae", c.mae}});
    }
    return j.dump(2) + "\n";
}

namespace {

[[noreturn]] void schema_error(const std::string& why) {
    throw Error(ErrorKind::Validation, "report.json: " + why);
}

const json& member(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        schema_error(std::string("missing key '") + key + "'");
    }
    return obj.at(key);
}

double number(const json& obj, const char* key) {
    const auto& v = member(obj, key);
    if (!v.is_number()) schema_error(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

DayRange day_range(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        schema_error("fold ranges must be [first, last]");
    }
    return DayRange{v[0].get<int>(), v[1].get<int>()};
}

} // namespace

MetricsReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string("report.json is not valid JSON: ") + e.what());
    }
    if (member(j, "schema") != "volmoe-report") schema_error("unexpected schema name");
    if (member(j, "schema_version") != kReportSchemaVersion) schema_error("unsupported schema_version");

    MetricsReport report;
    const auto& seed = member(j, "master_seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) schema_error("master_seed must be an integer");
    report.master_seed = seed.get<std::uint64_t>();
    report.config = detail::config_from_json(member(j, "config"));

    for (const auto& f : member(j, "folds")) {
        report.folds.push_back(FoldSpec{day_range(member(f, "train")), day_range(member(f, "valid"))});
    }
    for (const auto& p : member(j, "linear_params")) {
        report.linear_params.push_back(LinearParams{number(p, "beta0"), number(p, "beta1"), number(p, "beta2")});
    }
    for (const auto& w : member(j, "warnings")) {
        if (!w.is_string()) schema_error("warnings must be strings");
        report.warnings.push_back(w.get<std::string>());
    }
    const auto& cells = member(j, "cells");
    if (!cells.is_array()) schema_error("cells must be an array");
    for (const auto& c : cells) {
        MetricsCell cell;
        try {
            cell.model = parse_model(member(c, "model").get<std::string>());
            cell.group = parse_class_group(member(c, "class").get<std::string>());
        } catch (const json::exception&) {
            schema_error("model and class must be strings");
        } catch (const Error& e) {
            schema_error(e.what());
        }
        const auto& horizon = member(c, "horizon");
        if (!horizon.is_string()) schema_error("horizon must be a string");
        cell.horizon = horizon.get<std::string>();
        const auto& n = member(c, "n");
        if (!n.is_number_integer() || n.get<long long>() <= 0) schema_error("cell n must be a positive integer");
        cell.n = n.get<std::size_t>();
        cell.mse = number(c, "mse");
        cell.rmse = number(c, "rmse");
        cell.mae = number(c, "mae");
        report.cells.push_back(std::move(cell));
    }
    return report;
}

void write_metrics_csv(std::span<const MetricsCell> cells, std::ostream& out) {
    out << kMetricsCsvHeader << '\n';
    for (const auto& c : cells) {
        out << to_string(c.model) << ',' << to_string(c.group) << ',' << c.horizon << ',' << c.n << ','
            << textio::format_double(c.mse) << ',' << textio::format_double(c.rmse) << ','
            << textio::format_double(c.mae) << '\n';
    }
}

void write_predictions_csv(std::span<const PredictionRecord> records, std::ostream& out) {
    out << kPredictionsCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.company_id << ',' << r.fold << ',' << r.day << ',' << textio::format_double(r.actual) << ','
            << textio::format_double(r.y_rnn) << ',' << textio::format_double(r.y_lm) << ','
            << textio::format_double(r.y_moe) << ',' << to_string(r.cls) << '\n';
    }
}

namespace {

std::string fixed4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::string_view row_label(Model m) {
    return m == Model::Moe ? "MoE (RNN + Linear)" : to_string(m);
}

std::string_view group_title(ClassGroup g) {
    switch (g) {
    case ClassGroup::Stable: return "Non-volatile companies";
    case ClassGroup::Volatile: return "Volatile companies";
    case ClassGroup::All: return "All companies";
    }
    return "";
}

} // namespace

void render_report(const MetricsReport& report, ReportFormat format, std::ostream& out) {
    if (report.cells.empty()) {
        throw Error(ErrorKind::Validation, "report has no metric cells");
    }
    const auto horizons = report.horizons();
    // Validate before printing anything.
    for (ClassGroup g : kClassGroups) {
        for (const auto& h : horizons) {
            int present = 0;
            for (Model m : kModels) {
                present += report.find(m, g, h) != nullptr;
            }
            if (present == 0) {
                continue;
            }
            for (Model m : kModels) {
                if (!report.find(m, g, h)) {
                    throw Error(ErrorKind::Validation, "report is missing the " + std::string(to_string(m)) +
                                                           " row for class '" + std::string(to_string(g)) +
                                                           "', horizon " + h);
                }
            }
        }
    }

    if (format == ReportFormat::Csv) {
        out << "class,horizon,model,n,mse,mae\n";
    }
    bool first = true;
    for (ClassGroup g : kClassGroups) {
        for (const auto& h : horizons) {
            if (!report.find(Model::Rnn, g, h)) {
                continue;
            }
            if (format == ReportFormat::Csv) {
                for (Model m : kModels) {
                    const auto* c = report.find(m, g, h);
                    out << to_string(g) << ',' << h << ',' << to_string(m) << ',' << c->n << ','
                        << textio::format_double(c->mse) << ',' << textio::format_double(c->mae) << '\n';
                }
                continue;
            }
            if (!first) {
                out << '\n';
            }
            first = false;
            const auto* any = report.find(Model::Rnn, g, h);
            out << group_title(g) << " (horizon " << h << ", n = " << any->n << ")\n";
            char line[128];
            std::snprintf(line, sizeof line, "%-20s %12s %12s\n", "Model", "MSE", "MAE");
            out << line;
            for (Model m : kModels) {
                const auto* c = report.find(m, g, h);
                std::snprintf(line, sizeof line, "%-20s %12s %12s\n", std::string(row_label(m)).c_str(),
                              fixed4(c->mse).c_str(), fixed4(c->mae).c_str());
                out << line;
            }
        }
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw Error(ErrorKind::Io, "failed while writing '" + path.string() + "'");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

} // namespace volmoe
