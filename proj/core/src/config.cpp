#include "volmoe/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json_internal.hpp"
#include "volmoe/error.hpp"

namespace volmoe {

using nlohmann::json;
using nlohmann::ordered_json;

TrainConfig LstmBlock::train_config() const {
    TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = batch;
    tc.lr = lr;
    tc.patience = patience;
    tc.val_fraction = val_fraction;
    tc.min_delta = min_delta;
    tc.clip_norm = clip_norm;
    tc.hidden = hidden;
    return tc;
}

std::string_view to_string(MoeRnnPool pool) {
    return pool == MoeRnnPool::Volatile ? "volatile" : "all";
}

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& why) {
    throw Error(ErrorKind::Config, key + ": " + why);
}

void check(bool ok, const std::string& key, const std::string& why) {
    if (!ok) {
        config_error(key, why);
    }
}

class Block {
public:
    Block(const json& node, std::string path, std::set<std::string> allowed) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            config_error(path_, "must be a JSON object");
        }
        for (const auto& [key, value] : node_.items()) {
            if (!allowed.contains(key)) {
                config_error(qualified(key), "unknown key");
            }
        }
    }

    [[nodiscard]] std::string qualified(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    [[nodiscard]] const json* find(const std::string& key) const {
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void read(const std::string& key, int& out) const {
        if (const json* v = find(key)) {
            check(v->is_number_integer(), qualified(key), "must be an integer");
            const auto x = v->get<long long>();
            check(x >= INT32_MIN && x <= INT32_MAX, qualified(key), "out of range");
            out = static_cast<int>(x);
        }
    }
    void read(const std::string& key, std::uint64_t& out) const {
        if (const json* v = find(key)) {
            check(v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0), qualified(key),
                  "must be a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void read(const std::string& key, double& out) const {
        if (const json* v = find(key)) {
            check(v->is_number(), qualified(key), "must be a number");
            out = v->get<double>();
        }
    }
    void read(const std::string& key, std::string& out) const {
        if (const json* v = find(key)) {
            check(v->is_string(), qualified(key), "must be a string");
            out = v->get<std::string>();
        }
    }

private:
    const json& node_;
    std::string path_;
};

void read_gate_weights(const Block& gate, const std::string& key, GateWeights& out) {
    const json* node = gate.find(key);
    if (!node) {
        return;
    }
    if (node->is_array()) {
        check(node->size() == 2 && (*node)[0].is_number() && (*node)[1].is_number(), gate.qualified(key),
              "must be [w_rnn, w_lm]");
        out = GateWeights{(*node)[0].get<double>(), (*node)[1].get<double>()};
        return;
    }
    Block weights(*node, gate.qualified(key), {"w_rnn", "w_lm"});
    weights.read("w_rnn", out.w_rnn);
    weights.read("w_lm", out.w_lm);
}

} // namespace

void ExperimentConfig::validate() const {
    dataset.validate();
    check(dataset.n_companies <= 100000, "dataset.n_companies", "must be <= 100000");
    check(dataset.days <= 1000000, "dataset.days", "must be <= 1000000");

    lstm.train_config().validate();
    check(lstm.window >= 1 && lstm.window <= 1000, "lstm.window", "must lie in [1, 1000]");
    check(lstm.hidden <= 1024, "lstm.hidden", "must be <= 1024");

    const auto check_weights = [](const GateWeights& w, const std::string& key) {
        check(w.w_rnn >= 0.0 && w.w_lm >= 0.0, key, "weights must be non-negative");
        check(std::abs(w.w_rnn + w.w_lm - 1.0) <= 1e-12, key, "weights must sum to 1");
    };
    check_weights(gate.weights_volatile, "gate.volatile");
    check_weights(gate.weights_stable, "gate.stable");
    check(gate.threshold == dataset.sigma_threshold, "gate.threshold", "must equal dataset.sigma_threshold");

    const auto& wf = walkforward;
    check(wf.init_train >= lstm.window + 1, "walkforward.init_train",
          "must be >= lstm.window + 1 so every fold yields training windows");
    check(wf.val_len >= 1, "walkforward.val_len", "must be >= 1");
    check(wf.step >= 1, "walkforward.step", "must be >= 1");
    check(wf.init_train + wf.val_len <= dataset.days, "walkforward.val_len",
          "first validation window must fit inside dataset.days");
    check(wf.trading_days_per_month >= 1, "walkforward.trading_days_per_month", "must be >= 1");

    check(!output.out_dir.empty(), "output.out_dir", "must not be empty");
    check(!output.dataset_csv.empty(), "output.dataset_csv", "must not be empty");
}

namespace detail {

ExperimentConfig config_from_json(const json& root) {
    ExperimentConfig cfg;
    Block top(root, "", {"dataset", "lstm", "gate", "walkforward", "seeds", "output"});

    if (const json* node = top.find("dataset")) {
        Block b(*node, "dataset", {"n_companies", "T", "mu", "sigma_min", "sigma_max", "sigma_threshold", "p0"});
        b.read("n_companies", cfg.dataset.n_companies);
        b.read("T", cfg.dataset.days);
        b.read("mu", cfg.dataset.mu);
        b.read("sigma_min", cfg.dataset.sigma_min);
        b.read("sigma_max", cfg.dataset.sigma_max);
        b.read("sigma_threshold", cfg.dataset.sigma_threshold);
        b.read("p0", cfg.dataset.p0);
    }
    if (const json* node = top.find("lstm")) {
        Block b(*node, "lstm",
                {"window", "hidden", "lr", "batch", "epochs", "patience", "val_fraction", "min_delta", "clip_norm"});
        b.read("window", cfg.lstm.window);
        b.read("hidden", cfg.lstm.hidden);
        b.read("lr", cfg.lstm.lr);
        b.read("batch", cfg.lstm.batch);
        b.read("epochs", cfg.lstm.epochs);
        b.read("patience", cfg.lstm.patience);
        b.read("val_fraction", cfg.lstm.val_fraction);
        b.read("min_delta", cfg.lstm.min_delta);
        b.read("clip_norm", cfg.lstm.clip_norm);
    }
    if (const json* node = top.find("gate")) {
        Block b(*node, "gate", {"volatile", "stable", "rnn_pool"});
        read_gate_weights(b, "volatile", cfg.gate.weights_volatile);
        read_gate_weights(b, "stable", cfg.gate.weights_stable);
        std::string pool = std::string(to_string(cfg.moe_rnn_pool));
        b.read("rnn_pool", pool);
        if (pool == "all") {
            cfg.moe_rnn_pool = MoeRnnPool::All;
        } else if (pool == "volatile") {
            cfg.moe_rnn_pool = MoeRnnPool::Volatile;
        } else {
            config_error("gate.rnn_pool", "must be \"all\" or \"volatile\"");
        }
    }
    if (const json* node = top.find("walkforward")) {
        Block b(*node, "walkforward", {"init_train", "val_len", "step", "trading_days_per_month"});
        b.read("init_train", cfg.walkforward.init_train);
        b.read("val_len", cfg.walkforward.val_len);
        b.read("step", cfg.walkforward.step);
        b.read("trading_days_per_month", cfg.walkforward.trading_days_per_month);
    }
    if (const json* node = top.find("seeds")) {
        Block b(*node, "seeds", {"master_seed", "shuffle_seed"});
        b.read("master_seed", cfg.seeds.master_seed);
        b.read("shuffle_seed", cfg.seeds.shuffle_seed);
    }
    if (const json* node = top.find("output")) {
        Block b(*node, "output", {"dataset_csv", "out_dir"});
        b.read("dataset_csv", cfg.output.dataset_csv);
        b.read("out_dir", cfg.output.out_dir);
    }
    cfg.gate.threshold = cfg.dataset.sigma_threshold;
    cfg.validate();
    return cfg;
}

ordered_json config_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["dataset"] = {{"n_companies", cfg.dataset.n_companies}, {"T", cfg.dataset.days},
                    {"mu", cfg.dataset.mu},                   {"sigma_min", cfg.dataset.sigma_min},
                    {"sigma_max", cfg.dataset.sigma_max},     {"sigma_threshold", cfg.dataset.sigma_threshold},
                    {"p0", cfg.dataset.p0}};
    j["lstm"] = {{"window", cfg.lstm.window},
                 {"hidden", cfg.lstm.hidden},
                 {"lr", cfg.lstm.lr},
                 {"batch", cfg.lstm.batch},
                 {"epochs", cfg.lstm.epochs},
                 {"patience", cfg.lstm.patience},
                 {"val_fraction", cfg.lstm.val_fraction},
                 {"min_delta", cfg.lstm.min_delta},
                 {"clip_norm", cfg.lstm.clip_norm}};
    j["gate"] = {{"volatile", {{"w_rnn", cfg.gate.weights_volatile.w_rnn}, {"w_lm", cfg.gate.weights_volatile.w_lm}}},
                 {"stable", {{"w_rnn", cfg.gate.weights_stable.w_rnn}, {"w_lm", cfg.gate.weights_stable.w_lm}}},
                 {"rnn_pool", std::string(to_string(cfg.moe_rnn_pool))}};
    j["walkforward"] = {{"init_train", cfg.walkforward.init_train},
                        {"val_len", cfg.walkforward.val_len},
                        {"step", cfg.walkforward.step},
                        {"trading_days_per_month", cfg.walkforward.trading_days_per_month}};
    j["seeds"] = {{"master_seed", cfg.seeds.master_seed}, {"shuffle_seed", cfg.seeds.shuffle_seed}};
    j["output"] = {{"dataset_csv", cfg.output.dataset_csv}, {"out_dir", cfg.output.out_dir}};
    return j;
}

} // namespace detail

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
    }
    return detail::config_from_json(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open config '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
    return detail::config_json(cfg).dump(indent);
}

} // namespace volmoe
