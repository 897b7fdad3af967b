#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "volmoe/evalharness.hpp"

namespace volmoe {

inline constexpr std::string_view kMetricsCsvHeader = "model,class,horizon,n,mse,rmse,mae";
inline constexpr std::string_view kPredictionsCsvHeader = "company_id,fold,day,actual,y_rnn,y_lm,y_moe,class";
inline constexpr int kReportSchemaVersion = 1;

std::string report_to_json(const MetricsReport& report);
/// Validates the documented schema; throws Parse or Validation.
MetricsReport report_from_json(std::string_view text);

void write_metrics_csv(std::span<const MetricsCell> cells, std::ostream& out);
void write_predictions_csv(std::span<const PredictionRecord> records, std::ostream& out);

enum class ReportFormat { Text, Csv };

/// Per class group and horizon, one table with the RNN, Linear and MoE rows.
/// Throws Validation naming the first missing model row.
void render_report(const MetricsReport& report, ReportFormat format, std::ostream& out);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace volmoe
