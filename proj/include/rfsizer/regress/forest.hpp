#pragma once

#include <cstdint>
#include <vector>

#include "rfsizer/regress/regressor.hpp"

namespace rfsizer {

// CART regression tree with multi-output leaves (per-target means) and the
// variance-reduction (L2) split criterion.
class RegressionTree {
public:
    struct Node {
        std::int32_t feature = -1;    // -1: leaf
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::int32_t leaf_offset = -1;  // into leaf_values_, leaves only
    };

    void fit(const TableView& x, const TableView& y, std::span<const std::size_t> rows,
             int max_depth);
    void predict(std::span<const double> x, std::span<double> out) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t output_dim() const { return out_dim_; }

    void save(std::ostream& out) const;
    static RegressionTree load(std::istream& in);

private:
    int grow(const TableView& x, const TableView& y, std::vector<std::size_t>& rows,
             std::size_t begin, std::size_t end, int depth, int max_depth);

    std::vector<Node> nodes_;
    std::vector<double> leaf_values_;
    std::size_t out_dim_ = 0;
};

class RandomForest final : public Regressor {
public:
    static std::unique_ptr<RandomForest> fit(const TableView& x, const TableView& y,
                                             const TrainConfig& cfg);

    ModelKind kind() const override { return ModelKind::random_forest; }
    std::size_t input_dim() const override { return in_dim_; }
    std::size_t output_dim() const override { return out_dim_; }
    void predict_one(std::span<const double> in, std::span<double> out) const override;
    void save_payload(std::ostream& out) const override;
    static std::unique_ptr<RandomForest> load_payload(std::istream& in);

    const std::vector<RegressionTree>& trees() const { return trees_; }

    // Out-of-bag MSE over rows left out of at least one bootstrap sample.
    // Only meaningful on a freshly fitted forest (bags are not serialized).
    double oob_mse(const TableView& x, const TableView& y) const;

private:
    std::vector<RegressionTree> trees_;
    std::vector<std::vector<std::uint8_t>> in_bag_;  // [tree][row], transient
    std::size_t in_dim_ = 0;
    std::size_t out_dim_ = 0;
};

}  // namespace rfsizer
