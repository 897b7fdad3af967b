#include "volmoe/commands.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>

#include "volmoe/error.hpp"
#include "volmoe/evalharness.hpp"
#include "volmoe/textio.hpp"

namespace volmoe {

namespace fs = std::filesystem;

GateWeights parse_gate_override(std::string_view text) {
    const auto parts = textio::split(text, ',');
    GateWeights w;
    if (parts.size() != 2 || !textio::parse_double(parts[0], w.w_rnn) || !textio::parse_double(parts[1], w.w_lm)) {
        throw Error(ErrorKind::Config, "--gate-override: expected 'w_rnn,w_lm', got '" + std::string(text) + "'");
    }
    try {
        w.validate();
    } catch (const Error&) {
        throw Error(ErrorKind::Config, "--gate-override: weights must be non-negative and sum to 1");
    }
    return w;
}

ExperimentConfig resolve_config(const std::optional<fs::path>& path, std::optional<std::uint64_t> seed) {
    ExperimentConfig cfg = path ? load_config(*path) : ExperimentConfig{};
    if (seed) {
        cfg.seeds.master_seed = *seed;
    }
    cfg.validate();
    return cfg;
}

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "volmoe: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "volmoe: unexpected failure: " << e.what() << '\n';
    }
    return 1;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "'");
    }
}

} // namespace

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ExperimentConfig cfg = resolve_config(opts.config, opts.seed);
        const fs::path target = opts.out ? *opts.out : fs::path(cfg.output.dataset_csv);
        if (target.has_parent_path()) {
            ensure_directory(target.parent_path());
        }
        const Dataset ds = generate_dataset(cfg.dataset, cfg.seeds.master_seed);
        export_csv(ds, target);
        std::size_t n_volatile = 0;
        for (const auto& c : ds.companies) {
            n_volatile += c.cls == VolatilityClass::Volatile;
        }
        out << "wrote " << target.string() << ": " << ds.companies.size() << " companies x " << cfg.dataset.days
            << " days (stable " << ds.companies.size() - n_volatile << ", volatile " << n_volatile
            << ", master_seed " << cfg.seeds.master_seed << ")\n";
        return 0;
    });
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ExperimentConfig cfg = resolve_config(opts.config, opts.seed);
        if (opts.gate_override) {
            cfg.gate.weights_volatile = *opts.gate_override;
            cfg.gate.weights_stable = *opts.gate_override;
        }
        cfg.validate();
        const fs::path dataset_path = opts.dataset ? *opts.dataset : fs::path(cfg.output.dataset_csv);
        const fs::path out_dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.output.out_dir);

        const Dataset ds = import_csv(dataset_path, cfg.dataset, cfg.seeds.master_seed);
        const ExperimentResult result = run_experiment(ds, cfg);

        ensure_directory(out_dir);
        ensure_directory(out_dir / "checkpoints");
        std::ostringstream metrics;
        write_metrics_csv(result.report.cells, metrics);
        std::ostringstream predictions;
        write_predictions_csv(result.predictions, predictions);
        write_text_file(out_dir / "metrics.csv", metrics.str());
        write_text_file(out_dir / "predictions.csv", predictions.str());
        const auto hash = cfg.lstm.train_config().hash();
        for (const auto& m : result.models) {
            const std::string stem = "fold" + std::to_string(m.index);
            save_checkpoint(out_dir / "checkpoints" / (stem + "_rnn.ckpt"),
                            Checkpoint{m.rnn.params, cfg.lstm.window, hash});
            if (m.moe_rnn) {
                save_checkpoint(out_dir / "checkpoints" / (stem + "_moe_rnn.ckpt"),
                                Checkpoint{m.moe_rnn->params, cfg.lstm.window, hash});
            }
        }
        // report.json last: its presence marks a complete run.
        write_text_file(out_dir / "report.json", report_to_json(result.report));

        for (const auto& w : result.report.warnings) {
            err << "volmoe: warning: " << w << '\n';
        }
        out << "evaluated " << result.report.folds.size() << " fold(s), " << result.predictions.size()
            << " predictions per model; outputs in " << out_dir.string() << '\n';
        return 0;
    });
}

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const MetricsReport report = report_from_json(read_text_file(opts.report));
        std::ostringstream rendered;
        render_report(report, opts.format, rendered);
        out << rendered.str();
        return 0;
    });
}

} // namespace volmoe
