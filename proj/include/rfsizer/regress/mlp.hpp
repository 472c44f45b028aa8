#pragma once

#include <Eigen/Core>

#include "rfsizer/regress/regressor.hpp"

namespace rfsizer {

// Fully connected network: rectified-linear hidden layers, linear output,
// mean-squared-error objective, adaptive-moment training, seeded uniform
// fan-in initialization. Hidden widths default to {200,300,500,500,300,200}.
class Mlp final : public Regressor {
public:
    static std::unique_ptr<Mlp> make(std::size_t in_dim, std::size_t out_dim,
                                     const TrainConfig& cfg);
    static std::unique_ptr<Mlp> fit(const TableView& x, const TableView& y,
                                    const TrainConfig& cfg, std::vector<double>* curve);

    ModelKind kind() const override { return ModelKind::mlp; }
    std::size_t input_dim() const override { return widths_.front(); }
    std::size_t output_dim() const override { return widths_.back(); }
    void predict_one(std::span<const double> in, std::span<double> out) const override;
    void save_payload(std::ostream& out) const override;
    static std::unique_ptr<Mlp> load_payload(std::istream& in);

    // Batch MSE loss; fills the parameter gradient when `grad` is non-null.
    double loss(const TableView& x, const TableView& y,
                std::span<const std::size_t> rows, Eigen::VectorXd* grad) const;

    // Smallest |pre-activation| over all hidden units for the given rows;
    // lets gradient checks skip instances sitting on a rectifier kink.
    double min_abs_preactivation(const TableView& x, std::span<const std::size_t> rows) const;

    const Eigen::VectorXd& theta() const { return theta_; }
    void set_theta(const Eigen::VectorXd& t);
    const std::vector<int>& widths() const { return widths_; }

private:
    std::vector<int> widths_;   // in, hidden..., out
    Eigen::VectorXd theta_;     // per layer: W (out x in, row-major), then b
    std::vector<std::size_t> w_off_, b_off_;

    void index_layout();
    void init_weights(std::uint64_t seed);
};

}  // namespace rfsizer
