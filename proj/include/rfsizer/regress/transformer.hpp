#pragma once

#include <Eigen/Core>

#include "rfsizer/regress/regressor.hpp"
#include "rfsizer/rng.hpp"

namespace rfsizer {

// Set-style encoder over specification tokens. Each input scalar becomes one
// token: value times a learned per-token projection plus a learned identity
// embedding. Encoder layers use pre-layer normalization, multi-head
// self-attention and a rectified-linear feed-forward block, with dropout
// active during training only. Tokens are mean-pooled into a linear head.
// There is no positional encoding, so outputs are invariant under a joint
// permutation of tokens and their embeddings.
class TransformerNet final : public Regressor {
public:
    struct Shape {
        int tokens = 0;
        int dim = 200;
        int heads = 2;
        int layers = 6;
        int ff = 200;
        int out = 0;
        double dropout = 0.1;
    };

    static std::unique_ptr<TransformerNet> make(std::size_t in_dim, std::size_t out_dim,
                                                const TrainConfig& cfg);
    static std::unique_ptr<TransformerNet> fit(const TableView& x, const TableView& y,
                                               const TrainConfig& cfg,
                                               std::vector<double>* curve);

    ModelKind kind() const override { return ModelKind::transformer; }
    std::size_t input_dim() const override { return shape_.tokens; }
    std::size_t output_dim() const override { return shape_.out; }
    void predict_one(std::span<const double> in, std::span<double> out) const override;
    void save_payload(std::ostream& out) const override;
    static std::unique_ptr<TransformerNet> load_payload(std::istream& in);

    // Batch MSE; fills the parameter gradient when `grad` is non-null.
    // `dropout_rng` enables training-mode dropout; pass nullptr for the
    // deterministic evaluation path.
    double loss(const TableView& x, const TableView& y, std::span<const std::size_t> rows,
                Eigen::VectorXd* grad, SplitMix64* dropout_rng) const;

    // Attention probabilities for one input, evaluation mode:
    // result[layer][head] is a tokens x tokens row-stochastic matrix.
    std::vector<std::vector<Eigen::MatrixXd>> attention_probs(std::span<const double> in) const;

    // Smallest |pre-activation| over the feed-forward rectifiers (the only
    // kinks); used by gradient checks to skip degenerate instances.
    double min_abs_preactivation(const TableView& x, std::span<const std::size_t> rows) const;

    const Shape& shape() const { return shape_; }
    const Eigen::VectorXd& theta() const { return theta_; }
    void set_theta(const Eigen::VectorXd& t);

    // Flat-parameter offsets of the per-token blocks (value projection and
    // identity embedding), each tokens x dim row-major.
    std::size_t wval_offset() const { return 0; }
    std::size_t wemb_offset() const;

private:
    struct LayerOffsets {
        std::size_t ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo;
        std::size_t ln2_g, ln2_b, w1, b1, w2, b2;
    };
    struct LayerCache;
    struct SampleCache;

    void index_layout();
    void init_weights(std::uint64_t seed);
    void forward_sample(std::span<const double> in, SampleCache& cache,
                        SplitMix64* dropout_rng) const;

    Shape shape_;
    Eigen::VectorXd theta_;
    std::vector<LayerOffsets> lo_;
    std::size_t wemb_off_ = 0, head_w_off_ = 0, head_b_off_ = 0;
};

}  // namespace rfsizer
