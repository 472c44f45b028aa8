#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "rfsizer/errors.hpp"
#include "rfsizer/regress/regressor.hpp"
#include "rfsizer/rng.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

// First-order adaptive-moment minimization of a differentiable objective.
// `loss_grad(rows, grad)` must return the batch loss and fill `grad` for the
// current `theta`. Returns the per-iteration loss curve. Throws
// TrainingError on NaN/Inf loss. Deterministic for a fixed seed.
inline std::vector<double> adam_minimize(
    Eigen::VectorXd& theta, std::size_t n_rows, const TrainConfig& cfg,
    const std::function<double(std::span<const std::size_t>, Eigen::VectorXd&)>& loss_grad) {
    const std::size_t batch =
        cfg.batch_size > 0 ? std::min<std::size_t>(cfg.batch_size, n_rows)
                           : std::min<std::size_t>(n_rows, 1024);

    Eigen::VectorXd grad(theta.size());
    Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 batch_rng(cfg.seed ^ 0x7F4A7C15ull);

    std::vector<double> curve;
    curve.reserve(cfg.max_iter);
    double best_loss = std::numeric_limits<double>::infinity();
    int stall = 0;
    std::size_t cursor = n_rows;  // force a reshuffle on first minibatch epoch

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        std::span<const std::size_t> rows;
        if (batch == n_rows) {
            rows = {order.data(), n_rows};
        } else {
            if (cursor + batch > n_rows) {
                shuffle_in_place(std::span<std::size_t>(order), batch_rng);
                cursor = 0;
            }
            rows = {order.data() + cursor, batch};
            cursor += batch;
        }

        const double loss = loss_grad(rows, grad);
        if (!std::isfinite(loss))
            throw TrainingError("training diverged at iteration " + std::to_string(iter) +
                                ": loss = " + format_compact(loss));
        curve.push_back(loss);

        const double bc1 = 1.0 - std::pow(beta1, iter + 1);
        const double bc2 = 1.0 - std::pow(beta2, iter + 1);
        m = beta1 * m + (1.0 - beta1) * grad;
        v = (beta2 * v.array() + (1.0 - beta2) * grad.array().square()).matrix();
        theta.array() -=
            cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);

        if (loss < best_loss - 1e-15) {
            best_loss = loss;
            stall = 0;
        } else if (++stall >= cfg.patience) {
            break;
        }
    }
    return curve;
}

}  // namespace rfsizer
