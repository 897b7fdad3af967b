#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "volmoe/error.hpp"
#include "volmoe/report_io.hpp"

using namespace volmoe;

namespace {

MetricsReport sample_report() {
    MetricsReport r;
    r.master_seed = 42;
    r.folds = {FoldSpec{{1, 80}, {81, 100}}};
    r.linear_params = {LinearParams{99.5, 0.0512, -1.25}};
    r.warnings = {"example warning"};
    double base = 0.1;
    for (ClassGroup g : kClassGroups) {
        for (Model m : kModels) {
            const double mse_v = base * 1.37;
            r.cells.push_back(MetricsCell{m, g, "1m", 20, mse_v, std::sqrt(mse_v), base});
            base += 0.0123456789;
        }
    }
    return r;
}

std::string render(const MetricsReport& r, ReportFormat f) {
    std::ostringstream out;
    render_report(r, f, out);
    return out.str();
}

int count(const std::string& text, std::string_view needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST(ReportJson, RoundTripIsExact) {
    const auto r = sample_report();
    const auto text = report_to_json(r);
    const auto back = report_from_json(text);
    EXPECT_EQ(back, r);
    EXPECT_EQ(report_to_json(back), text);
}

TEST(ReportJson, SchemaFields) {
    const auto text = report_to_json(sample_report());
    for (const char* key : {"\"schema\"", "\"schema_version\"", "\"master_seed\"", "\"config\"", "\"folds\"",
                            "\"linear_params\"", "\"warnings\"", "\"cells\""}) {
        EXPECT_NE(text.find(key), std::string::npos) << key;
    }
}

TEST(ReportJson, RejectsMalformedInput) {
    for (const char* bad : {"", "{", "[]", R"({"schema": "other"})"}) {
        try {
            report_from_json(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_TRUE(e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Validation) << bad;
        }
    }
    auto text = report_to_json(sample_report());
    text.replace(text.find("\"MoE\""), 5, "\"GRU\"");
    EXPECT_THROW(report_from_json(text), Error);
}

TEST(ReportRender, TextHasThreeTablesOfThreeRows) {
    const auto text = render(sample_report(), ReportFormat::Text);
    EXPECT_EQ(count(text, "Non-volatile companies"), 1);
    EXPECT_EQ(count(text, "Volatile companies"), 1);
    EXPECT_EQ(count(text, "All companies"), 1);
    EXPECT_EQ(count(text, "\nRNN "), 3);
    EXPECT_EQ(count(text, "\nLinear "), 3);
    EXPECT_EQ(count(text, "\nMoE (RNN + Linear)"), 3);
    EXPECT_EQ(text.find("0,1370"), std::string::npos);
    EXPECT_NE(text.find("0.1370"), std::string::npos) << text;
}

TEST(ReportRender, CsvIsStable) {
    const auto a = render(sample_report(), ReportFormat::Csv);
    const auto b = render(report_from_json(report_to_json(sample_report())), ReportFormat::Csv);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.substr(0, a.find('\n')), "class,horizon,model,n,mse,mae");
    EXPECT_EQ(count(a, "\n"), 10);
}

TEST(ReportRender, MissingModelRowNamesTheGap) {
    auto r = sample_report();
    r.cells.erase(std::remove_if(r.cells.begin(), r.cells.end(),
                                 [](const MetricsCell& c) {
                                     return c.model == Model::Linear && c.group == ClassGroup::Volatile;
                                 }),
                  r.cells.end());
    try {
        render(r, ReportFormat::Text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("Linear"), std::string::npos) << msg;
        EXPECT_NE(msg.find("volatile"), std::string::npos) << msg;
    }
}

TEST(ReportRender, OmittedClassIsSkipped) {
    auto r = sample_report();
    r.cells.erase(std::remove_if(r.cells.begin(), r.cells.end(),
                                 [](const MetricsCell& c) { return c.group == ClassGroup::Stable; }),
                  r.cells.end());
    const auto text = render(r, ReportFormat::Text);
    EXPECT_EQ(count(text, "Non-volatile"), 0);
    EXPECT_EQ(count(text, "Volatile companies"), 1);
}

TEST(MetricsCsv, HeaderAndRows) {
    const auto r = sample_report();
    std::ostringstream out;
    write_metrics_csv(r.cells, out);
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kMetricsCsvHeader);
    EXPECT_EQ(count(text, "\n"), 10);
    EXPECT_NE(text.find("MoE,all,1m,20,"), std::string::npos) << text;
}

TEST(PredictionsCsv, ShortestRoundTripNumbers) {
    PredictionRecord rec;
    rec.company_id = 4;
    rec.fold = 0;
    rec.day = 81;
    rec.actual = 0.1 + 0.2;
    rec.y_rnn = 104.25;
    rec.y_lm = 1.0 / 3.0;
    rec.y_moe = -2.5;
    rec.cls = VolatilityClass::Volatile;
    const std::vector<PredictionRecord> recs{rec};
    std::ostringstream out;
    write_predictions_csv(recs, out);
    EXPECT_EQ(out.str(), std::string(kPredictionsCsvHeader) +
                             "\n4,0,81,0.30000000000000004,104.25,0.3333333333333333,-2.5,volatile\n");
}

TEST(TextFiles, RoundTripAndMissingFile) {
    const auto path = std::filesystem::temp_directory_path() / "volmoe_report_io_test.txt";
    write_text_file(path, "alpha\nbeta\n");
    EXPECT_EQ(read_text_file(path), "alpha\nbeta\n");
    std::filesystem::remove(path);
    try {
        read_text_file(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}
