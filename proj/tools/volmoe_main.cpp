#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "volmoe/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Volatility-gated mixture of experts for synthetic stock price prediction"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string dataset;
    std::string gate_override;
    std::string format = "text";
    std::string report_path;
    std::uint64_t seed = 0;

    auto* generate = app.add_subcommand("generate", "Simulate the synthetic market and write the dataset CSV");
    generate->add_option("--config", config, "Experiment config (JSON); built-in defaults when omitted");
    generate->add_option("--out", out, "Dataset CSV path");
    generate->add_option("--seed", seed, "Override seeds.master_seed");

    auto* evaluate = app.add_subcommand("evaluate", "Walk-forward evaluation of the RNN, linear and MoE models");
    evaluate->add_option("--config", config, "Experiment config (JSON)");
    evaluate->add_option("--dataset", dataset, "Dataset CSV produced by 'generate'");
    evaluate->add_option("--out", out, "Output directory");
    evaluate->add_option("--seed", seed, "Override seeds.master_seed");
    evaluate->add_option("--gate-override", gate_override, "Use w_rnn,w_lm for both volatility classes");

    auto* report = app.add_subcommand("report", "Print MSE/MAE tables from a report.json");
    report->add_option("report", report_path, "report.json written by 'evaluate'")->required();
    report->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

    CLI11_PARSE(app, argc, argv);

    auto optional_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
    };

    if (generate->parsed()) {
        volmoe::GenerateOptions opts;
        opts.config = optional_path(config);
        opts.out = optional_path(out);
        if (generate->count("--seed") > 0) opts.seed = seed;
        return volmoe::cmd_generate(opts, std::cout, std::cerr);
    }
    if (evaluate->parsed()) {
        volmoe::EvaluateOptions opts;
        opts.config = optional_path(config);
        opts.dataset = optional_path(dataset);
        opts.out_dir = optional_path(out);
        if (evaluate->count("--seed") > 0) opts.seed = seed;
        if (!gate_override.empty()) {
            try {
                opts.gate_override = volmoe::parse_gate_override(gate_override);
            } catch (const std::exception& e) {
                std::cerr << "volmoe: " << e.what() << '\n';
                return 2;
            }
        }
        return volmoe::cmd_evaluate(opts, std::cout, std::cerr);
    }
    volmoe::ReportOptions opts;
    opts.report = report_path;
    opts.format = format == "csv" ? volmoe::ReportFormat::Csv : volmoe::ReportFormat::Text;
    return volmoe::cmd_report(opts, std::cout, std::cerr);
}
