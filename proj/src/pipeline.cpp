#include "rfsizer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rfsizer/errors.hpp"
#include "rfsizer/regress/forest.hpp"
#include "rfsizer/regress/lookup.hpp"
#include "rfsizer/regress/mlp.hpp"
#include "rfsizer/regress/svr.hpp"
#include "rfsizer/regress/transformer.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

namespace {

std::vector<std::string> spec_names(BlockId block) {
    std::vector<std::string> names;
    for (const auto& f : schema(block).specs) names.push_back(f.name);
    return names;
}

std::vector<std::string> param_names(BlockId block) {
    std::vector<std::string> names;
    for (const auto& f : schema(block).params) names.push_back(f.name);
    return names;
}

// Gathers selected dataset rows into dense standardized tables.
struct StdTables {
    std::vector<double> x;  // standardized specs
    std::vector<double> y;  // standardized params
    TableView xv, yv;
};

StdTables standardize_rows(const Dataset& ds, std::span<const std::size_t> rows,
                           const Standardizer& spec_std, const Standardizer& param_std) {
    StdTables t;
    const std::size_t ns = ds.n_specs(), np = ds.n_params();
    t.x.resize(rows.size() * ns);
    t.y.resize(rows.size() * np);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        spec_std.transform(ds.spec_row(rows[i]), {t.x.data() + i * ns, ns});
        param_std.transform(ds.param_row(rows[i]), {t.y.data() + i * np, np});
    }
    t.xv = {t.x.data(), rows.size(), ns};
    t.yv = {t.y.data(), rows.size(), np};
    return t;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SpecErrors compute_errors(const SpecVector& wanted, const SpecVector& got, ErrorMode mode) {
    if (wanted.block != got.block || wanted.values.size() != got.values.size())
        throw SchemaError("compute_errors: spec vectors disagree on block/shape");
    SpecErrors s;
    const std::size_t n = wanted.values.size();
    s.err.resize(n);
    s.abs_fallback.assign(n, false);
    double num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = wanted.values[i];
        const double yhat = got.values[i];
        const double diff = std::abs(y - yhat);
        if (y == 0.0) {
            s.err[i] = std::abs(yhat);
            s.abs_fallback[i] = true;
        } else {
            s.err[i] = diff / std::abs(y);
        }
        num2 += (y - yhat) * (y - yhat);
        den2 += y * y;
    }
    if (mode == ErrorMode::norm_ratio) {
        s.err_agg = den2 > 0.0 ? std::sqrt(num2) / std::sqrt(den2) : std::sqrt(num2);
    } else {
        double total = 0.0;
        for (double e : s.err) total += e;
        s.err_agg = total / static_cast<double>(n);
    }
    return s;
}

namespace {

void verify_simulator_matches(const Dataset& ds, const SimulatorAdapter& sim, std::size_t row) {
    const SpecVector resim = sim.run(ds.param_vector(row));
    const auto stored = ds.spec_row(row);
    for (std::size_t i = 0; i < stored.size(); ++i) {
        const double tol = 1e-9 * std::max(1.0, std::abs(stored[i]));
        if (std::abs(resim.values[i] - stored[i]) > tol)
            throw Error("dataset row " + std::to_string(row) +
                        " does not match this simulator configuration (spec '" +
                        schema(ds.block()).specs[i].name + "': stored " + format_compact(stored[i]) +
                        ", re-simulated " + format_compact(resim.values[i]) + ")");
    }
}

}  // namespace

TrainResult train(ModelKind kind, const Dataset& ds, const Split& split, const TrainConfig& cfg) {
    if (ds.rows() == 0) throw TrainingError("empty dataset");
    for (std::size_t r : split.train)
        if (r >= ds.rows()) throw std::domain_error("split: train index out of range");
    for (std::size_t r : split.test)
        if (r >= ds.rows()) throw std::domain_error("split: test index out of range");
    if (split.train.empty()) throw std::domain_error("split: no training rows");

    TrainResult result;

    if (kind == ModelKind::lookup) {
        // Diagnostic path: memorize the raw rows, all of them.
        std::vector<std::size_t> all(ds.rows());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::vector<double> x(ds.rows() * ds.n_specs()), y(ds.rows() * ds.n_params());
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            auto sr = ds.spec_row(i);
            auto pr = ds.param_row(i);
            std::copy(sr.begin(), sr.end(), x.begin() + i * ds.n_specs());
            std::copy(pr.begin(), pr.end(), y.begin() + i * ds.n_params());
        }
        TableView xv{x.data(), ds.rows(), ds.n_specs()};
        TableView yv{y.data(), ds.rows(), ds.n_params()};
        auto core = LookupModel::fit(xv, yv);
        result.curve = {0.0};
        result.model = FittedModel::assemble(ds.block(), cfg.seed, split.test_fraction,
                                             std::move(core), std::nullopt, std::nullopt);
        return result;
    }

    // Standardizers see the training rows only.
    std::vector<double> all_specs(ds.rows() * ds.n_specs());
    std::vector<double> all_params(ds.rows() * ds.n_params());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        auto sr = ds.spec_row(i);
        auto pr = ds.param_row(i);
        std::copy(sr.begin(), sr.end(), all_specs.begin() + i * ds.n_specs());
        std::copy(pr.begin(), pr.end(), all_params.begin() + i * ds.n_params());
    }
    Standardizer spec_std =
        Standardizer::fit(all_specs, ds.n_specs(), split.train, spec_names(ds.block()));
    Standardizer param_std =
        Standardizer::fit(all_params, ds.n_params(), split.train, param_names(ds.block()));

    StdTables tables = standardize_rows(ds, split.train, spec_std, param_std);

    std::unique_ptr<Regressor> core;
    switch (kind) {
        case ModelKind::random_forest: {
            auto forest = RandomForest::fit(tables.xv, tables.yv, cfg);
            result.curve = {mse_of(*forest, tables.xv, tables.yv)};
            core = std::move(forest);
            break;
        }
        case ModelKind::svr: {
            auto svr = SvrModel::fit(tables.xv, tables.yv, cfg);
            result.curve = {mse_of(*svr, tables.xv, tables.yv)};
            core = std::move(svr);
            break;
        }
        case ModelKind::mlp: {
            core = Mlp::fit(tables.xv, tables.yv, cfg, &result.curve);
            break;
        }
        case ModelKind::transformer: {
            core = TransformerNet::fit(tables.xv, tables.yv, cfg, &result.curve);
            break;
        }
        default:
            throw TrainingError("unsupported model kind");
    }

    result.model = FittedModel::assemble(ds.block(), cfg.seed, split.test_fraction,
                                         std::move(core), std::move(spec_std),
                                         std::move(param_std));
    return result;
}

EvalReport evaluate(const FittedModel& model, const Dataset& ds, const Split& split,
                    const SimulatorAdapter& sim, ErrorMode mode) {
    if (model.block() != ds.block())
        throw SchemaError("model block " + block_name(model.block()) + " does not match dataset " +
                          block_name(ds.block()));
    if (!sim.supports(ds.block()))
        throw Error("simulator does not support block " + block_name(ds.block()));

    // The scores below only mean something if this simulator is the one that
    // produced the dataset. A generated dataset carries the config hash; a
    // CSV-loaded one is spot-verified row by row.
    const bool hash_known = ds.sim_hash.has_value();
    if (hash_known && *ds.sim_hash != sim.config_hash())
        throw Error("simulator configuration does not match the dataset (config hash mismatch)");

    EvalReport report;
    report.block = ds.block();
    report.kind = model.kind();
    report.seed = model.seed();
    report.mode = mode;
    report.rows_total = split.test.size();

    for (std::size_t row : split.test) {
        if (row >= ds.rows()) throw std::domain_error("split: test index out of range");
        RowEval re;
        re.row = row;
        const SpecVector wanted = ds.spec_vector(row);
        const ParamVector predicted = model.predict(wanted);
        if (!hash_known) verify_simulator_matches(ds, sim, row);
        try {
            const SpecVector achieved = sim.run(predicted);
            SpecErrors s = compute_errors(wanted, achieved, mode);
            re.err = std::move(s.err);
            re.abs_fallback = std::move(s.abs_fallback);
            re.err_agg = s.err_agg;
            ++report.rows_scored;
        } catch (const Error&) {
            re.infeasible = true;
            ++report.rows_infeasible;
        }
        report.rows.push_back(std::move(re));
    }

    recompute_summaries(report);
    return report;
}

void recompute_summaries(EvalReport& report) {
    const std::size_t n_specs = schema(report.block).specs.size();
    report.per_spec.assign(n_specs, SummaryStat{});
    report.aggregated = SummaryStat{};

    std::vector<std::vector<double>> spec_errs(n_specs);
    std::vector<double> agg_errs;
    for (const auto& row : report.rows) {
        if (row.infeasible) continue;
        agg_errs.push_back(row.err_agg);
        for (std::size_t i = 0; i < n_specs; ++i) spec_errs[i].push_back(row.err[i]);
    }
    auto fill = [](SummaryStat& st, const std::vector<double>& v) {
        if (v.empty()) return;
        double total = 0.0, mx = v[0];
        for (double e : v) {
            total += e;
            mx = std::max(mx, e);
        }
        st.mean = total / static_cast<double>(v.size());
        st.median = median_of(v);
        st.max = mx;
    };
    fill(report.aggregated, agg_errs);
    for (std::size_t i = 0; i < n_specs; ++i) fill(report.per_spec[i], spec_errs[i]);
}

InverseDesignResult inverse_design(const FittedModel& model, const SpecVector& desired,
                                   const SimulatorAdapter& sim, ErrorMode mode) {
    InverseDesignResult result;
    PredictOutcome out = model.predict_full(desired);
    result.params = std::move(out.params);
    result.clamped = std::move(out.clamped);
    try {
        result.achieved = sim.run(result.params);
    } catch (const Error& e) {
        result.infeasible = true;
        result.failure = e.what();
        return result;
    }
    SpecErrors s = compute_errors(desired, result.achieved, mode);
    result.err = std::move(s.err);
    result.abs_fallback = std::move(s.abs_fallback);
    result.err_agg = s.err_agg;
    return result;
}

void save_report(const EvalReport& report, const std::string& csv_path,
                 const std::string& summary_path) {
    const auto& sc = schema(report.block);

    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open for writing: " + csv_path);
    csv << "row,infeasible,err_agg";
    for (const auto& f : sc.specs) csv << ",err:" << f.name;
    csv << ",abs_fallback\n";
    for (const auto& row : report.rows) {
        csv << row.row << ',' << (row.infeasible ? 1 : 0) << ',';
        csv << (row.infeasible ? "" : g17(row.err_agg));
        for (std::size_t i = 0; i < sc.specs.size(); ++i)
            csv << ',' << (row.infeasible ? "" : g17(row.err[i]));
        std::string flagged;
        if (!row.infeasible)
            for (std::size_t i = 0; i < sc.specs.size(); ++i)
                if (row.abs_fallback[i]) flagged += (flagged.empty() ? "" : ";") + sc.specs[i].name;
        csv << ',' << flagged << '\n';
    }
    if (!csv) throw IoError("write failed: " + csv_path);

    std::ofstream sum(summary_path, std::ios::binary);
    if (!sum) throw IoError("cannot open for writing: " + summary_path);
    sum << "block=" << sc.name << '\n';
    sum << "model=" << model_kind_name(report.kind) << '\n';
    sum << "seed=" << report.seed << '\n';
    sum << "error_mode=" << (report.mode == ErrorMode::norm_ratio ? "norm_ratio" : "mean_individual")
        << '\n';
    sum << "rows_total=" << report.rows_total << '\n';
    sum << "rows_scored=" << report.rows_scored << '\n';
    sum << "rows_infeasible=" << report.rows_infeasible << '\n';
    sum << "mean_err_agg=" << g17(report.aggregated.mean) << '\n';
    sum << "median_err_agg=" << g17(report.aggregated.median) << '\n';
    sum << "max_err_agg=" << g17(report.aggregated.max) << '\n';
    for (std::size_t i = 0; i < sc.specs.size(); ++i) {
        sum << "mean_err:" << sc.specs[i].name << "=" << g17(report.per_spec[i].mean) << '\n';
        sum << "median_err:" << sc.specs[i].name << "=" << g17(report.per_spec[i].median) << '\n';
        sum << "max_err:" << sc.specs[i].name << "=" << g17(report.per_spec[i].max) << '\n';
    }
    if (!sum) throw IoError("write failed: " + summary_path);
}

}  // namespace rfsizer
