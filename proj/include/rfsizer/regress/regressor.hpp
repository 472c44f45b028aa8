#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rfsizer {

enum class ModelKind : std::uint8_t {
    random_forest = 0,
    svr = 1,
    mlp = 2,
    transformer = 3,
    lookup = 4,  // diagnostic: memorizes rows, for validating the eval loop
};

const std::string& model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);  // throws ConfigError

// Row-major matrix view used at the fit/predict boundary.
struct TableView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<const double> row(std::size_t i) const { return {data + i * cols, cols}; }
};

struct TrainConfig {
    int max_iter = 2000;          // gradient steps (MLP/transformer)
    double learning_rate = 1e-3;
    int batch_size = 0;           // 0: full batch up to 1024 rows
    std::uint64_t seed = 0;
    int patience = 200;           // early stop after this many non-improving steps

    // random forest
    int rf_trees = 100;
    int rf_max_depth = 0;         // 0: unlimited
    bool rf_bootstrap = true;

    // support vector regression
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_tol = 1e-3;        // KKT violation tolerance
    int svr_max_iter = 200000;    // pair updates per target
    double svr_gamma = 0.0;       // 0: scale rule 1/(d*var)

    // network shapes; defaults match the published model table
    std::vector<int> mlp_hidden;  // empty: {200, 300, 500, 500, 300, 200}
    int tf_dim_model = 200;
    int tf_heads = 2;
    int tf_layers = 6;
    int tf_ff = 200;
    double tf_dropout = 0.1;
};

// A fitted core model operating entirely in its fit-time representation
// (standardized values for everything except the lookup diagnostic).
// Implementations are immutable after fit and safe for concurrent predict.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual ModelKind kind() const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t output_dim() const = 0;

    virtual void predict_one(std::span<const double> in, std::span<double> out) const = 0;

    virtual void save_payload(std::ostream& out) const = 0;
};

std::vector<double> predict_rows(const Regressor& model, const TableView& inputs);

// Mean squared error of model predictions against targets, averaged over
// rows and output components.
double mse_of(const Regressor& model, const TableView& inputs, const TableView& targets);

}  // namespace rfsizer
