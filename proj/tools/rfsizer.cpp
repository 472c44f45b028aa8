// Command-line front end for the circuit-sizing toolkit: dataset generation,
// inverse-model training and evaluation, single-point inverse design, and
// OCEAN measurement-script emission.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rfsizer/dataset.hpp"
#include "rfsizer/errors.hpp"
#include "rfsizer/oceangen.hpp"
#include "rfsizer/pipeline.hpp"
#include "rfsizer/rfmodel.hpp"
#include "rfsizer/units.hpp"

namespace {

using namespace rfsizer;

// Settings assembled from defaults, then config file, then RFSIZER_* env
// vars, then flags (last writer wins).
struct CliSettings {
    SimConfig sim;
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
    ErrorMode err_mode = ErrorMode::norm_ratio;
};

ErrorMode parse_err_mode(const std::string& s) {
    if (s == "norm") return ErrorMode::norm_ratio;
    if (s == "mean") return ErrorMode::mean_individual;
    throw ConfigError("err_mode must be 'norm' or 'mean', got '" + s + "'");
}

bool apply_cli_key(CliSettings& cfg, const std::string& key, const std::string& value) {
    if (apply_sim_key(cfg.sim, key, value)) return true;
    if (key == "seed") {
        cfg.seed = std::stoull(value);
        return true;
    }
    if (key == "test_fraction") {
        double v;
        if (!parse_double(value, v)) throw ConfigError("invalid test_fraction '" + value + "'");
        cfg.test_fraction = v;
        return true;
    }
    if (key == "err_mode") {
        cfg.err_mode = parse_err_mode(value);
        return true;
    }
    return false;
}

const char* kConfigKeys[] = {
    "k_gm", "k_cgs", "k_var_min", "k_var_max", "j_bias", "gamma_noise", "vdd", "z0",
    "q_ind", "q_xfmr", "k_couple", "kT", "flicker_corner",
    "f_rf", "f_lo", "f_if", "pn_offset", "pa_pin_start_dbm", "pa_pin_stop_dbm",
    "pa_pin_step_db", "mixer_vin_amp", "sens_bw", "sens_snr_db",
    "lna_gamma_s_re", "lna_gamma_s_im", "lna_gamma_l_re", "lna_gamma_l_im",
    "seed", "test_fraction", "err_mode",
};

CliSettings load_settings(const std::string& config_path) {
    CliSettings cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot open config file: " + config_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            auto e = line.find_last_not_of(" \t\r");
            line = line.substr(b, e - b + 1);
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key=value");
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
            while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
                value.erase(0, 1);
            if (!apply_cli_key(cfg, key, value))
                throw ConfigError("unknown config key '" + key + "' on line " +
                                  std::to_string(lineno));
        }
    }
    // Environment overrides sit between the file and the flags.
    for (const char* key : kConfigKeys) {
        const std::string env_name = std::string("RFSIZER_") + key;
        if (const char* value = std::getenv(env_name.c_str())) apply_cli_key(cfg, key, value);
    }
    cfg.sim.dc.validate();
    cfg.sim.op.validate();
    return cfg;
}

std::vector<std::pair<std::string, double>> parse_named_values(
    const std::vector<std::string>& raw, const char* what) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& item : raw) {
        auto eq = item.find('=');
        double v = 0.0;
        if (eq == std::string::npos || !parse_double(item.substr(eq + 1), v))
            throw ConfigError(std::string(what) + " must be name=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), v);
    }
    return out;
}

void write_split_manifest(const std::string& path, const Split& split, std::size_t n_rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "seed=" << split.seed << '\n';
    out << "test_fraction=" << g17(split.test_fraction) << '\n';
    out << "n_rows=" << n_rows << '\n';
    out << "n_train=" << split.train.size() << '\n';
    out << "n_test=" << split.test.size() << '\n';
    auto join = [](const std::vector<std::size_t>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    out << "train=" << join(split.train) << '\n';
    out << "test=" << join(split.test) << '\n';
}

int cmd_gen_data(const std::string& block_name_arg, const std::string& out_path,
                 const std::string& config_path) {
    const CliSettings cfg = load_settings(config_path);
    const BlockId block = block_from_name(block_name_arg);
    const Dataset ds = generate_dataset(builtin_plan(block), cfg.sim.dc, cfg.sim.op);
    save_csv(ds, out_path);
    std::cout << ds.rows() << " rows written to " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& model_name,
              const std::string& out_path, const std::string& config_path, TrainConfig train_cfg,
              std::optional<std::uint64_t> seed_flag, std::optional<double> fraction_flag) {
    CliSettings cfg = load_settings(config_path);
    if (seed_flag) cfg.seed = *seed_flag;
    if (fraction_flag) cfg.test_fraction = *fraction_flag;
    train_cfg.seed = cfg.seed;

    const ModelKind kind = model_kind_from_name(model_name);
    const Dataset ds = load_csv(data_path);
    const Split split = split_dataset(ds, cfg.seed, cfg.test_fraction);

    TrainResult result = train(kind, ds, split, train_cfg);
    result.model.save(out_path);
    write_split_manifest(out_path + ".split", split, ds.rows());

    std::cout << "block=" << block_name(ds.block()) << " model=" << model_kind_name(kind)
              << " train_rows=" << split.train.size() << " test_rows=" << split.test.size()
              << "\n";
    std::cout << "final_train_loss=" << g17(result.curve.empty() ? 0.0 : result.curve.back())
              << "\n";
    std::cout << "model written to " << out_path << "\n";
    return 0;
}

int cmd_eval(const std::string& data_path, const std::string& model_path,
             const std::string& report_path, const std::string& config_path,
             std::optional<std::string> err_mode_flag) {
    CliSettings cfg = load_settings(config_path);
    if (err_mode_flag) cfg.err_mode = parse_err_mode(*err_mode_flag);

    const Dataset ds = load_csv(data_path);
    const FittedModel model = FittedModel::load(model_path);
    const Split split = make_split(ds.rows(), model.seed(), model.test_fraction());
    const AnalyticAdapter sim(cfg.sim.dc, cfg.sim.op);

    const EvalReport report = evaluate(model, ds, split, sim, cfg.err_mode);
    save_report(report, report_path, report_path + ".summary");

    std::cout << "scored=" << report.rows_scored << " infeasible=" << report.rows_infeasible
              << "\n";
    std::cout << "median_err_agg=" << g17(report.aggregated.median) << "\n";
    std::cout << "report written to " << report_path << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::vector<std::string>& spec_args,
                bool no_simulate, const std::string& config_path) {
    const CliSettings cfg = load_settings(config_path);
    const FittedModel model = FittedModel::load(model_path);
    const SpecVector desired =
        SpecVector::from_named(model.block(), parse_named_values(spec_args, "--spec"));

    const auto& sc = schema(model.block());
    if (no_simulate) {
        const PredictOutcome out = model.predict_full(desired);
        for (std::size_t i = 0; i < out.params.values.size(); ++i)
            std::cout << sc.params[i].name << " = " << g17(out.params.values[i]) << " "
                      << sc.params[i].unit << (out.clamped[i] ? " (clamped)" : "") << "\n";
        return 0;
    }

    const AnalyticAdapter sim(cfg.sim.dc, cfg.sim.op);
    const InverseDesignResult result = inverse_design(model, desired, sim, cfg.err_mode);
    for (std::size_t i = 0; i < result.params.values.size(); ++i)
        std::cout << sc.params[i].name << " = " << g17(result.params.values[i]) << " "
                  << sc.params[i].unit << (result.clamped[i] ? " (clamped)" : "") << "\n";
    if (result.infeasible) {
        std::cout << "infeasible: " << result.failure << "\n";
        return 1;
    }
    for (std::size_t i = 0; i < result.achieved.values.size(); ++i)
        std::cout << "achieved " << sc.specs[i].name << " = " << g17(result.achieved.values[i])
                  << " " << sc.specs[i].unit << " (err " << g17(result.err[i]) << ")\n";
    std::cout << "err_agg = " << g17(result.err_agg) << "\n";
    return 0;
}

int cmd_emit_ocean(const std::string& system_name, const std::string& metrics_arg,
                   const std::string& out_path, const std::vector<std::string>& bind_args) {
    OceanSystem system;
    if (system_name == "tx") system = OceanSystem::tx;
    else if (system_name == "rx") system = OceanSystem::rx;
    else throw ConfigError("--system must be tx or rx, got '" + system_name + "'");

    std::vector<std::string> metrics;
    if (metrics_arg == "all") {
        for (const auto& m : measurement_table(system)) metrics.push_back(m.metric);
    } else {
        std::size_t start = 0;
        while (start <= metrics_arg.size()) {
            auto comma = metrics_arg.find(',', start);
            std::string item = metrics_arg.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) metrics.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (metrics.empty()) throw ConfigError("--metrics must name at least one metric or 'all'");
    }

    Bindings bindings;
    for (const auto& item : bind_args) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--bind must be key=value, got '" + item + "'");
        bindings[item.substr(0, eq)] = item.substr(eq + 1);
    }

    const std::string script = emit_script(system, metrics, bindings);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + out_path);
    out << script;
    std::cout << metrics.size() << " measurements written to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rfsizer: analytic 28 GHz transceiver block models, sweep datasets, "
                 "inverse-regression sizing and OCEAN script generation"};
    app.require_subcommand(1);

    // gen-data
    std::string gd_block, gd_out, gd_config;
    auto* gen = app.add_subcommand("gen-data", "Generate the built-in sweep dataset for a block");
    gen->add_option("--block", gd_block, "Block id (vco|pa|lna|mixer|cascode|tx_system|rx_system)")
        ->required();
    gen->add_option("--out", gd_out, "Output CSV path")->required();
    gen->add_option("--config", gd_config, "key=value config file");

    // train
    std::string tr_data, tr_model, tr_out, tr_config;
    std::optional<std::uint64_t> tr_seed;
    std::optional<double> tr_fraction;
    TrainConfig tr_cfg;
    bool tr_no_bootstrap = false;
    auto* tr = app.add_subcommand("train", "Train an inverse model on a dataset CSV");
    tr->add_option("--data", tr_data, "Dataset CSV")->required();
    tr->add_option("--model", tr_model, "Model kind (rf|svr|mlp|transformer|lookup)")->required();
    tr->add_option("--out", tr_out, "Output model container path")->required();
    tr->add_option("--seed", tr_seed, "Training seed");
    tr->add_option("--test-fraction", tr_fraction, "Held-out fraction (default 0.2)");
    tr->add_option("--config", tr_config, "key=value config file");
    tr->add_option("--max-iter", tr_cfg.max_iter, "Gradient steps (mlp/transformer)");
    tr->add_option("--lr", tr_cfg.learning_rate, "Learning rate");
    tr->add_option("--batch", tr_cfg.batch_size, "Batch size (0 = full batch)");
    tr->add_option("--patience", tr_cfg.patience, "Early-stop patience");
    tr->add_option("--trees", tr_cfg.rf_trees, "Random-forest tree count");
    tr->add_option("--max-depth", tr_cfg.rf_max_depth, "Random-forest depth limit (0 = none)");
    tr->add_flag("--no-bootstrap", tr_no_bootstrap, "Disable bootstrap sampling");
    tr->add_option("--svr-c", tr_cfg.svr_c, "SVR box constraint");
    tr->add_option("--svr-epsilon", tr_cfg.svr_epsilon, "SVR insensitive tube");
    tr->add_option("--svr-gamma", tr_cfg.svr_gamma, "RBF gamma (0 = scale rule)");

    // eval
    std::string ev_data, ev_model, ev_report, ev_config;
    std::optional<std::string> ev_err_mode;
    auto* ev = app.add_subcommand("eval", "Evaluate a trained model on its test split");
    ev->add_option("--data", ev_data, "Dataset CSV")->required();
    ev->add_option("--model-file", ev_model, "Trained model container")->required();
    ev->add_option("--report", ev_report, "Output report CSV path")->required();
    ev->add_option("--config", ev_config, "key=value config file");
    ev->add_option("--err-mode", ev_err_mode, "Aggregated error: norm|mean");

    // predict
    std::string pr_model, pr_config;
    std::vector<std::string> pr_specs;
    bool pr_no_sim = false;
    auto* pr = app.add_subcommand("predict", "Inverse-design parameters for desired specs");
    pr->add_option("--model-file", pr_model, "Trained model container")->required();
    pr->add_option("--spec", pr_specs, "Desired spec, name=value (repeatable)");
    pr->add_flag("--no-simulate", pr_no_sim, "Print predicted parameters only");
    pr->add_option("--config", pr_config, "key=value config file");

    // emit-ocean
    std::string eo_system, eo_metrics, eo_out;
    std::vector<std::string> eo_binds;
    auto* eo = app.add_subcommand("emit-ocean", "Write an OCEAN measurement script");
    eo->add_option("--system", eo_system, "tx or rx")->required();
    eo->add_option("--metrics", eo_metrics, "Comma-separated metric ids, or 'all'")->required();
    eo->add_option("--out", eo_out, "Output script path")->required();
    eo->add_option("--bind", eo_binds, "Node binding override key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gd_block, gd_out, gd_config);
        if (tr->parsed()) {
            tr_cfg.rf_bootstrap = !tr_no_bootstrap;
            return cmd_train(tr_data, tr_model, tr_out, tr_config, tr_cfg, tr_seed, tr_fraction);
        }
        if (ev->parsed()) return cmd_eval(ev_data, ev_model, ev_report, ev_config, ev_err_mode);
        if (pr->parsed()) return cmd_predict(pr_model, pr_specs, pr_no_sim, pr_config);
        if (eo->parsed()) return cmd_emit_ocean(eo_system, eo_metrics, eo_out, eo_binds);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
