#pragma once

#include <string>
#include <vector>

#include "rfsizer/dataset.hpp"
#include "rfsizer/oceangen.hpp"
#include "rfsizer/regress/model.hpp"

namespace rfsizer {

// Aggregated-error semantics: the ratio of Euclidean norms by default, or
// the mean of the per-spec individual errors.
enum class ErrorMode { norm_ratio, mean_individual };

// Discrepancy between a desired and an achieved spec vector. Individual
// errors are |y_i - yhat_i| / |y_i|; a zero denominator falls back to the
// absolute error and is flagged.
struct SpecErrors {
    std::vector<double> err;
    std::vector<bool> abs_fallback;
    double err_agg = 0.0;
};

SpecErrors compute_errors(const SpecVector& desired, const SpecVector& achieved,
                          ErrorMode mode = ErrorMode::norm_ratio);

struct TrainResult {
    FittedModel model;
    std::vector<double> curve;  // per-iteration losses (single entry for rf/svr)
};

// Fits the standardizers on the train rows only, then the chosen regressor.
// The lookup diagnostic memorizes every row (train and test) by design: it
// exists to prove the evaluation loop returns exactly zero error when
// predictions are perfect.
TrainResult train(ModelKind kind, const Dataset& ds, const Split& split, const TrainConfig& cfg);

struct RowEval {
    std::size_t row = 0;
    bool infeasible = false;           // simulator failed on the predicted point
    std::vector<double> err;           // per-spec individual errors
    std::vector<bool> abs_fallback;    // per-spec: denominator was zero, absolute error reported
    double err_agg = 0.0;
};

struct SummaryStat {
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct EvalReport {
    BlockId block = BlockId::vco;
    ModelKind kind = ModelKind::random_forest;
    std::uint64_t seed = 0;
    ErrorMode mode = ErrorMode::norm_ratio;
    std::size_t rows_total = 0;
    std::size_t rows_scored = 0;
    std::size_t rows_infeasible = 0;
    std::vector<RowEval> rows;         // sorted by dataset row index
    std::vector<SummaryStat> per_spec; // over scored rows
    SummaryStat aggregated;
};

// Per test row: predict parameters from the stored specs, re-simulate, and
// score the discrepancy. Individual error: |y_i - yhat_i| / |y_i| (absolute
// and flagged when y_i is 0). Rows whose re-simulation fails are flagged
// infeasible and excluded from the summaries.
EvalReport evaluate(const FittedModel& model, const Dataset& ds, const Split& split,
                    const SimulatorAdapter& sim, ErrorMode mode = ErrorMode::norm_ratio);

struct InverseDesignResult {
    ParamVector params;
    std::vector<bool> clamped;
    bool infeasible = false;
    std::string failure;        // simulator message when infeasible
    SpecVector achieved;        // valid unless infeasible
    std::vector<double> err;    // per-spec vs the request
    std::vector<bool> abs_fallback;
    double err_agg = 0.0;
};

InverseDesignResult inverse_design(const FittedModel& model, const SpecVector& desired,
                                   const SimulatorAdapter& sim,
                                   ErrorMode mode = ErrorMode::norm_ratio);

// Report files: one CSV row per evaluated row plus a flat key=value summary.
void save_report(const EvalReport& report, const std::string& csv_path,
                 const std::string& summary_path);

// Recomputes the summary block from the row data (used by tests and by
// save_report itself to keep the two representations consistent).
void recompute_summaries(EvalReport& report);

}  // namespace rfsizer
