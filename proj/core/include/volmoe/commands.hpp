#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "volmoe/config.hpp"
#include "volmoe/moe.hpp"
#include "volmoe/report_io.hpp"

namespace volmoe {

struct GenerateOptions {
    std::optional<std::filesystem::path> config; ///< built-in defaults when absent
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
};

struct EvaluateOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<GateWeights> gate_override; ///< applied to both volatility classes
};

struct ReportOptions {
    std::filesystem::path report;
    ReportFormat format = ReportFormat::Text;
};

/// Parses "w_rnn,w_lm"; throws Config on malformed or non-convex weights.
GateWeights parse_gate_override(std::string_view text);

ExperimentConfig resolve_config(const std::optional<std::filesystem::path>& path, std::optional<std::uint64_t> seed);

// Each command returns the process exit code: 0 iff every output was written.
int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err);

} // namespace volmoe
