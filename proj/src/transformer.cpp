#include "rfsizer/regress/transformer.hpp"

#include <cmath>

#include "rfsizer/errors.hpp"
#include "rfsizer/regress/training.hpp"
#include "rfsizer/serialize.hpp"

namespace rfsizer {

namespace {
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WMap = Eigen::Map<RowMajorMatrix>;
using WMapConst = Eigen::Map<const RowMajorMatrix>;
using VMap = Eigen::Map<Eigen::VectorXd>;
using VMapConst = Eigen::Map<const Eigen::VectorXd>;

constexpr double kLnEps = 1e-5;

// Row-wise softmax with the usual max-shift for stability.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
    Eigen::MatrixXd p = scores;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double m = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - m).exp();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

}  // namespace

// All intermediate values needed to run the backward pass for one sample.
struct TransformerNet::LayerCache {
    Eigen::MatrixXd x_in;              // T x d, layer input
    Eigen::MatrixXd xhat1;             // LN1 normalized input
    Eigen::VectorXd inv1;              // LN1 1/sqrt(var+eps) per token
    Eigen::MatrixXd u;                 // LN1 output
    Eigen::MatrixXd q, k, v;           // T x d
    std::vector<Eigen::MatrixXd> probs;       // per head, T x T (pre-dropout)
    std::vector<Eigen::MatrixXd> prob_mask;   // dropout masks on probs
    Eigen::MatrixXd concat;            // attention heads concatenated, T x d
    Eigen::MatrixXd attn_mask;         // dropout mask on attention output
    Eigen::MatrixXd x_mid;             // after attention residual
    Eigen::MatrixXd xhat2;
    Eigen::VectorXd inv2;
    Eigen::MatrixXd u2;                // LN2 output
    Eigen::MatrixXd z_ff;              // T x F pre-activation
    Eigen::MatrixXd h_ff;              // relu(z_ff)
    Eigen::MatrixXd ff_mask;           // dropout mask on feed-forward output
    Eigen::MatrixXd x_out;
};

struct TransformerNet::SampleCache {
    Eigen::MatrixXd x0;
    std::vector<LayerCache> layers;
    Eigen::VectorXd pooled;
    Eigen::VectorXd out;
};

std::size_t TransformerNet::wemb_offset() const { return wemb_off_; }

void TransformerNet::index_layout() {
    const std::size_t t = shape_.tokens, d = shape_.dim, f = shape_.ff, o = shape_.out;
    std::size_t off = 0;
    auto take = [&off](std::size_t n) {
        const std::size_t at = off;
        off += n;
        return at;
    };
    take(t * d);  // value projection at offset 0
    wemb_off_ = take(t * d);
    lo_.clear();
    for (int l = 0; l < shape_.layers; ++l) {
        LayerOffsets lofs;
        lofs.ln1_g = take(d);
        lofs.ln1_b = take(d);
        lofs.wq = take(d * d);
        lofs.bq = take(d);
        lofs.wk = take(d * d);
        lofs.bk = take(d);
        lofs.wv = take(d * d);
        lofs.bv = take(d);
        lofs.wo = take(d * d);
        lofs.bo = take(d);
        lofs.ln2_g = take(d);
        lofs.ln2_b = take(d);
        lofs.w1 = take(f * d);
        lofs.b1 = take(f);
        lofs.w2 = take(d * f);
        lofs.b2 = take(d);
        lo_.push_back(lofs);
    }
    head_w_off_ = take(o * d);
    head_b_off_ = take(o);
    theta_.resize(static_cast<Eigen::Index>(off));
}

void TransformerNet::init_weights(std::uint64_t seed) {
    SplitMix64 rng(seed);
    auto fill_uniform = [&](std::size_t offset, std::size_t count, double bound) {
        for (std::size_t i = 0; i < count; ++i)
            theta_[static_cast<Eigen::Index>(offset + i)] = rng.next_uniform(-bound, bound);
    };
    const std::size_t t = shape_.tokens, d = shape_.dim, f = shape_.ff, o = shape_.out;
    const double bd = 1.0 / std::sqrt(static_cast<double>(d));
    const double bf = 1.0 / std::sqrt(static_cast<double>(f));

    fill_uniform(0, t * d, 1.0);          // per-token scalar projection, fan-in 1
    fill_uniform(wemb_off_, t * d, 1.0);  // identity embeddings
    for (const auto& lofs : lo_) {
        // layer norms start at identity
        for (std::size_t i = 0; i < d; ++i) theta_[static_cast<Eigen::Index>(lofs.ln1_g + i)] = 1.0;
        for (std::size_t i = 0; i < d; ++i) theta_[static_cast<Eigen::Index>(lofs.ln1_b + i)] = 0.0;
        fill_uniform(lofs.wq, d * d, bd);
        fill_uniform(lofs.bq, d, bd);
        fill_uniform(lofs.wk, d * d, bd);
        fill_uniform(lofs.bk, d, bd);
        fill_uniform(lofs.wv, d * d, bd);
        fill_uniform(lofs.bv, d, bd);
        fill_uniform(lofs.wo, d * d, bd);
        fill_uniform(lofs.bo, d, bd);
        for (std::size_t i = 0; i < d; ++i) theta_[static_cast<Eigen::Index>(lofs.ln2_g + i)] = 1.0;
        for (std::size_t i = 0; i < d; ++i) theta_[static_cast<Eigen::Index>(lofs.ln2_b + i)] = 0.0;
        fill_uniform(lofs.w1, f * d, bd);
        fill_uniform(lofs.b1, f, bd);
        fill_uniform(lofs.w2, d * f, bf);
        fill_uniform(lofs.b2, d, bf);
    }
    fill_uniform(head_w_off_, o * d, bd);
    fill_uniform(head_b_off_, o, bd);
}

std::unique_ptr<TransformerNet> TransformerNet::make(std::size_t in_dim, std::size_t out_dim,
                                                     const TrainConfig& cfg) {
    auto net = std::make_unique<TransformerNet>();
    net->shape_.tokens = static_cast<int>(in_dim);
    net->shape_.dim = cfg.tf_dim_model;
    net->shape_.heads = cfg.tf_heads;
    net->shape_.layers = cfg.tf_layers;
    net->shape_.ff = cfg.tf_ff;
    net->shape_.out = static_cast<int>(out_dim);
    net->shape_.dropout = cfg.tf_dropout;
    if (net->shape_.dim % net->shape_.heads != 0)
        throw TrainingError("tf_dim_model must be divisible by tf_heads");
    if (net->shape_.dropout < 0.0 || net->shape_.dropout >= 1.0)
        throw TrainingError("tf_dropout must be in [0, 1)");
    net->index_layout();
    net->init_weights(cfg.seed);
    return net;
}

namespace {

// LayerNorm over the feature axis of each token row.
void layer_norm_forward(const Eigen::MatrixXd& x, VMapConst gamma, VMapConst beta,
                        Eigen::MatrixXd& xhat, Eigen::VectorXd& inv_std, Eigen::MatrixXd& out) {
    const Eigen::Index t = x.rows(), d = x.cols();
    xhat.resize(t, d);
    inv_std.resize(t);
    out.resize(t, d);
    for (Eigen::Index r = 0; r < t; ++r) {
        const double mean = x.row(r).mean();
        const double var = (x.row(r).array() - mean).square().sum() / static_cast<double>(d);
        const double inv = 1.0 / std::sqrt(var + kLnEps);
        inv_std[r] = inv;
        xhat.row(r) = ((x.row(r).array() - mean) * inv).matrix();
        out.row(r) =
            (xhat.row(r).array() * gamma.transpose().array() + beta.transpose().array()).matrix();
    }
}

// Accumulates dgamma/dbeta and returns the gradient w.r.t. the LN input.
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dout, const Eigen::MatrixXd& xhat,
                                    const Eigen::VectorXd& inv_std, VMapConst gamma, VMap dgamma,
                                    VMap dbeta) {
    const Eigen::Index t = dout.rows(), d = dout.cols();
    Eigen::MatrixXd dx(t, d);
    for (Eigen::Index r = 0; r < t; ++r) {
        dgamma += (dout.row(r).array() * xhat.row(r).array()).matrix().transpose();
        dbeta += dout.row(r).transpose();
        const Eigen::ArrayXd dxhat = dout.row(r).array().transpose() * gamma.array();
        const double mean_dxhat = dxhat.mean();
        const double mean_dxhat_xhat = (dxhat * xhat.row(r).array().transpose()).mean();
        dx.row(r) = (inv_std[r] *
                     (dxhat - mean_dxhat - xhat.row(r).array().transpose() * mean_dxhat_xhat))
                        .matrix()
                        .transpose();
    }
    return dx;
}

// Inverted dropout; keeps expectation in training mode.
Eigen::MatrixXd draw_mask(Eigen::Index rows, Eigen::Index cols, double p, SplitMix64* rng) {
    if (!rng || p <= 0.0) return Eigen::MatrixXd::Ones(rows, cols);
    const double keep = 1.0 - p;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = rng->next_unit() < keep ? 1.0 / keep : 0.0;
    return m;
}

}  // namespace

void TransformerNet::forward_sample(std::span<const double> in, SampleCache& cache,
                                    SplitMix64* dropout_rng) const {
    const int t = shape_.tokens, d = shape_.dim, h = shape_.heads;
    const int dh = d / h;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const double p = shape_.dropout;

    WMapConst wval(theta_.data() + wval_offset(), t, d);
    WMapConst wemb(theta_.data() + wemb_off_, t, d);

    cache.x0.resize(t, d);
    for (int tok = 0; tok < t; ++tok)
        cache.x0.row(tok) = in[tok] * wval.row(tok) + wemb.row(tok);

    cache.layers.resize(lo_.size());
    Eigen::MatrixXd x = cache.x0;
    for (std::size_t l = 0; l < lo_.size(); ++l) {
        const auto& lofs = lo_[l];
        LayerCache& lc = cache.layers[l];
        lc.x_in = x;

        VMapConst g1(theta_.data() + lofs.ln1_g, d), b1(theta_.data() + lofs.ln1_b, d);
        layer_norm_forward(x, g1, b1, lc.xhat1, lc.inv1, lc.u);

        WMapConst wq(theta_.data() + lofs.wq, d, d), wk(theta_.data() + lofs.wk, d, d),
            wv(theta_.data() + lofs.wv, d, d), wo(theta_.data() + lofs.wo, d, d);
        VMapConst bq(theta_.data() + lofs.bq, d), bk(theta_.data() + lofs.bk, d),
            bv(theta_.data() + lofs.bv, d), bo(theta_.data() + lofs.bo, d);

        lc.q = (lc.u * wq.transpose()).rowwise() + bq.transpose();
        lc.k = (lc.u * wk.transpose()).rowwise() + bk.transpose();
        lc.v = (lc.u * wv.transpose()).rowwise() + bv.transpose();

        lc.probs.resize(h);
        lc.prob_mask.resize(h);
        lc.concat.resize(t, d);
        for (int head = 0; head < h; ++head) {
            auto qh = lc.q.middleCols(head * dh, dh);
            auto kh = lc.k.middleCols(head * dh, dh);
            auto vh = lc.v.middleCols(head * dh, dh);
            lc.probs[head] = softmax_rows(qh * kh.transpose() * scale);
            lc.prob_mask[head] = draw_mask(t, t, p, dropout_rng);
            lc.concat.middleCols(head * dh, dh) =
                lc.probs[head].cwiseProduct(lc.prob_mask[head]) * vh;
        }

        Eigen::MatrixXd attn = (lc.concat * wo.transpose()).rowwise() + bo.transpose();
        lc.attn_mask = draw_mask(t, d, p, dropout_rng);
        lc.x_mid = x + attn.cwiseProduct(lc.attn_mask);

        VMapConst g2(theta_.data() + lofs.ln2_g, d), b2(theta_.data() + lofs.ln2_b, d);
        layer_norm_forward(lc.x_mid, g2, b2, lc.xhat2, lc.inv2, lc.u2);

        WMapConst w1(theta_.data() + lofs.w1, shape_.ff, d), w2(theta_.data() + lofs.w2, d, shape_.ff);
        VMapConst bf1(theta_.data() + lofs.b1, shape_.ff), bf2(theta_.data() + lofs.b2, d);
        lc.z_ff = (lc.u2 * w1.transpose()).rowwise() + bf1.transpose();
        lc.h_ff = lc.z_ff.cwiseMax(0.0);
        Eigen::MatrixXd ff = (lc.h_ff * w2.transpose()).rowwise() + bf2.transpose();
        lc.ff_mask = draw_mask(t, d, p, dropout_rng);
        lc.x_out = lc.x_mid + ff.cwiseProduct(lc.ff_mask);
        x = lc.x_out;
    }

    cache.pooled = x.colwise().mean().transpose();
    WMapConst wh(theta_.data() + head_w_off_, shape_.out, d);
    VMapConst bh(theta_.data() + head_b_off_, shape_.out);
    cache.out = wh * cache.pooled + bh;
}

double TransformerNet::loss(const TableView& x, const TableView& y,
                            std::span<const std::size_t> rows, Eigen::VectorXd* grad,
                            SplitMix64* dropout_rng) const {
    const int t = shape_.tokens, d = shape_.dim, h = shape_.heads, f = shape_.ff;
    const int dh = d / h;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const double denom = static_cast<double>(rows.size()) * shape_.out;

    if (grad) grad->setZero(theta_.size());

    double total_loss = 0.0;
    SampleCache cache;
    for (std::size_t r : rows) {
        forward_sample(x.row(r), cache, dropout_rng);

        Eigen::VectorXd diff(shape_.out);
        for (int c = 0; c < shape_.out; ++c) diff[c] = cache.out[c] - y.row(r)[c];
        total_loss += diff.squaredNorm() / denom;
        if (!grad) continue;

        Eigen::VectorXd dout = 2.0 * diff / denom;

        WMap dwh(grad->data() + head_w_off_, shape_.out, d);
        VMap dbh(grad->data() + head_b_off_, shape_.out);
        dwh += dout * cache.pooled.transpose();
        dbh += dout;

        WMapConst wh(theta_.data() + head_w_off_, shape_.out, d);
        Eigen::VectorXd dpooled = wh.transpose() * dout;
        Eigen::MatrixXd dx =
            (Eigen::VectorXd::Ones(t) / static_cast<double>(t)) * dpooled.transpose();

        for (std::size_t l = lo_.size(); l-- > 0;) {
            const auto& lofs = lo_[l];
            const LayerCache& lc = cache.layers[l];

            WMapConst w1(theta_.data() + lofs.w1, f, d), w2(theta_.data() + lofs.w2, d, f);
            WMap dw1(grad->data() + lofs.w1, f, d), dw2(grad->data() + lofs.w2, d, f);
            VMap db1(grad->data() + lofs.b1, f), db2(grad->data() + lofs.b2, d);

            // feed-forward block
            Eigen::MatrixXd dffo = dx.cwiseProduct(lc.ff_mask);
            dw2 += dffo.transpose() * lc.h_ff;
            db2 += dffo.colwise().sum().transpose();
            Eigen::MatrixXd dh_ff = dffo * w2;
            Eigen::MatrixXd dz_ff =
                ((lc.z_ff.array() > 0.0).cast<double>() * dh_ff.array()).matrix();
            dw1 += dz_ff.transpose() * lc.u2;
            db1 += dz_ff.colwise().sum().transpose();
            Eigen::MatrixXd du2 = dz_ff * w1;

            VMapConst g2(theta_.data() + lofs.ln2_g, d);
            VMap dg2(grad->data() + lofs.ln2_g, d), dbt2(grad->data() + lofs.ln2_b, d);
            Eigen::MatrixXd dx_mid =
                dx + layer_norm_backward(du2, lc.xhat2, lc.inv2, g2, dg2, dbt2);

            // attention block
            Eigen::MatrixXd dattn = dx_mid.cwiseProduct(lc.attn_mask);
            WMapConst wo(theta_.data() + lofs.wo, d, d);
            WMap dwo(grad->data() + lofs.wo, d, d);
            VMap dbo(grad->data() + lofs.bo, d);
            dwo += dattn.transpose() * lc.concat;
            dbo += dattn.colwise().sum().transpose();
            Eigen::MatrixXd dconcat = dattn * wo;

            Eigen::MatrixXd dq(t, d), dk(t, d), dv(t, d);
            for (int head = 0; head < h; ++head) {
                auto vh = lc.v.middleCols(head * dh, dh);
                auto qh = lc.q.middleCols(head * dh, dh);
                auto kh = lc.k.middleCols(head * dh, dh);
                const Eigen::MatrixXd& probs = lc.probs[head];
                const Eigen::MatrixXd& mask = lc.prob_mask[head];
                Eigen::MatrixXd dch = dconcat.middleCols(head * dh, dh);

                Eigen::MatrixXd masked_probs = probs.cwiseProduct(mask);
                Eigen::MatrixXd dp_masked = dch * vh.transpose();
                dv.middleCols(head * dh, dh) = masked_probs.transpose() * dch;

                Eigen::MatrixXd dp = dp_masked.cwiseProduct(mask);
                Eigen::MatrixXd ds(t, t);
                for (int row = 0; row < t; ++row) {
                    const double dot = dp.row(row).dot(probs.row(row));
                    ds.row(row) = (probs.row(row).array() * (dp.row(row).array() - dot)).matrix();
                }
                dq.middleCols(head * dh, dh) = ds * kh * scale;
                dk.middleCols(head * dh, dh) = ds.transpose() * qh * scale;
            }

            WMapConst wq(theta_.data() + lofs.wq, d, d), wk(theta_.data() + lofs.wk, d, d),
                wv(theta_.data() + lofs.wv, d, d);
            WMap dwq(grad->data() + lofs.wq, d, d), dwk(grad->data() + lofs.wk, d, d),
                dwv(grad->data() + lofs.wv, d, d);
            VMap dbq(grad->data() + lofs.bq, d), dbk(grad->data() + lofs.bk, d),
                dbv(grad->data() + lofs.bv, d);
            dwq += dq.transpose() * lc.u;
            dbq += dq.colwise().sum().transpose();
            dwk += dk.transpose() * lc.u;
            dbk += dk.colwise().sum().transpose();
            dwv += dv.transpose() * lc.u;
            dbv += dv.colwise().sum().transpose();

            Eigen::MatrixXd du = dq * wq + dk * wk + dv * wv;
            VMapConst g1(theta_.data() + lofs.ln1_g, d);
            VMap dg1(grad->data() + lofs.ln1_g, d), dbt1(grad->data() + lofs.ln1_b, d);
            dx = dx_mid + layer_norm_backward(du, lc.xhat1, lc.inv1, g1, dg1, dbt1);
        }

        // token construction
        WMap dwval(grad->data() + wval_offset(), t, d);
        WMap dwemb(grad->data() + wemb_off_, t, d);
        for (int tok = 0; tok < t; ++tok) {
            dwval.row(tok) += x.row(r)[tok] * dx.row(tok);
            dwemb.row(tok) += dx.row(tok);
        }
    }
    return total_loss;
}

std::unique_ptr<TransformerNet> TransformerNet::fit(const TableView& x, const TableView& y,
                                                    const TrainConfig& cfg,
                                                    std::vector<double>* curve) {
    if (x.rows < 1) throw TrainingError("transformer needs at least 1 row");
    if (x.rows != y.rows) throw TrainingError("input/target row mismatch");

    auto net = make(x.cols, y.cols, cfg);
    SplitMix64 dropout_rng(cfg.seed ^ 0xD1B54A32D192ED03ull);
    auto losses = adam_minimize(
        net->theta_, x.rows, cfg,
        [&](std::span<const std::size_t> rows, Eigen::VectorXd& grad) {
            return net->loss(x, y, rows, &grad, &dropout_rng);
        });
    if (curve) *curve = std::move(losses);
    return net;
}

void TransformerNet::predict_one(std::span<const double> in, std::span<double> out) const {
    SampleCache cache;
    forward_sample(in, cache, nullptr);
    for (int c = 0; c < shape_.out; ++c) out[c] = cache.out[c];
}

std::vector<std::vector<Eigen::MatrixXd>> TransformerNet::attention_probs(
    std::span<const double> in) const {
    SampleCache cache;
    forward_sample(in, cache, nullptr);
    std::vector<std::vector<Eigen::MatrixXd>> result;
    for (const auto& lc : cache.layers) result.push_back(lc.probs);
    return result;
}

double TransformerNet::min_abs_preactivation(const TableView& x,
                                             std::span<const std::size_t> rows) const {
    double min_abs = std::numeric_limits<double>::infinity();
    SampleCache cache;
    for (std::size_t r : rows) {
        forward_sample(x.row(r), cache, nullptr);
        for (const auto& lc : cache.layers)
            min_abs = std::min(min_abs, lc.z_ff.cwiseAbs().minCoeff());
    }
    return min_abs;
}

void TransformerNet::set_theta(const Eigen::VectorXd& t) {
    if (t.size() != theta_.size()) throw TrainingError("set_theta: size mismatch");
    theta_ = t;
}

void TransformerNet::save_payload(std::ostream& out) const {
    io::write_pod<std::int32_t>(out, shape_.tokens);
    io::write_pod<std::int32_t>(out, shape_.dim);
    io::write_pod<std::int32_t>(out, shape_.heads);
    io::write_pod<std::int32_t>(out, shape_.layers);
    io::write_pod<std::int32_t>(out, shape_.ff);
    io::write_pod<std::int32_t>(out, shape_.out);
    io::write_pod<double>(out, shape_.dropout);
    std::vector<double> flat(theta_.data(), theta_.data() + theta_.size());
    io::write_vec(out, flat);
}

std::unique_ptr<TransformerNet> TransformerNet::load_payload(std::istream& in) {
    auto net = std::make_unique<TransformerNet>();
    net->shape_.tokens = io::read_pod<std::int32_t>(in);
    net->shape_.dim = io::read_pod<std::int32_t>(in);
    net->shape_.heads = io::read_pod<std::int32_t>(in);
    net->shape_.layers = io::read_pod<std::int32_t>(in);
    net->shape_.ff = io::read_pod<std::int32_t>(in);
    net->shape_.out = io::read_pod<std::int32_t>(in);
    net->shape_.dropout = io::read_pod<double>(in);
    if (net->shape_.tokens < 1 || net->shape_.dim < 1 || net->shape_.heads < 1 ||
        net->shape_.layers < 0 || net->shape_.ff < 1 || net->shape_.out < 1 ||
        net->shape_.dim % net->shape_.heads != 0)
        throw CorruptionError("implausible transformer shape");
    net->index_layout();
    auto flat = io::read_vec(in);
    if (flat.size() != static_cast<std::size_t>(net->theta_.size()))
        throw CorruptionError("transformer parameter size mismatch");
    net->theta_ = Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
    return net;
}

}  // namespace rfsizer
