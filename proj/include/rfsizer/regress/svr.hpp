#pragma once

#include <vector>

#include "rfsizer/regress/regressor.hpp"

namespace rfsizer {

// Epsilon-insensitive support vector regression with an RBF kernel,
// k(a,b) = exp(-gamma*||a-b||^2), one independent machine per output target.
//
// Each machine is trained by sequential minimal optimization on the dual:
// the maximal-KKT-violating pair of dual coordinates is updated analytically
// under the box [0, C] and the balance constraint until the violation gap
// drops below svr_tol. The bias is recovered from the gap midpoint.
class SvrModel final : public Regressor {
public:
    struct Machine {
        std::vector<double> coeff;            // beta_i = alpha_i - alpha*_i, support only
        std::vector<std::size_t> support;     // row indices into x_
        double bias = 0.0;
        double final_gap = 0.0;               // KKT violation at termination
        int iterations = 0;
    };

    static std::unique_ptr<SvrModel> fit(const TableView& x, const TableView& y,
                                         const TrainConfig& cfg);

    ModelKind kind() const override { return ModelKind::svr; }
    std::size_t input_dim() const override { return in_dim_; }
    std::size_t output_dim() const override { return machines_.size(); }
    void predict_one(std::span<const double> in, std::span<double> out) const override;
    void save_payload(std::ostream& out) const override;
    static std::unique_ptr<SvrModel> load_payload(std::istream& in);

    double gamma() const { return gamma_; }
    const std::vector<Machine>& machines() const { return machines_; }

private:
    std::vector<double> x_;  // training inputs, row-major
    std::size_t in_dim_ = 0;
    std::size_t n_train_ = 0;
    double gamma_ = 0.0;
    std::vector<Machine> machines_;
};

}  // namespace rfsizer
