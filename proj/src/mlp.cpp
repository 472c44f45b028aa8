#include "rfsizer/regress/mlp.hpp"

#include <numeric>

#include "rfsizer/errors.hpp"
#include "rfsizer/regress/training.hpp"
#include "rfsizer/rng.hpp"
#include "rfsizer/serialize.hpp"

namespace rfsizer {

namespace {
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WMap = Eigen::Map<RowMajorMatrix>;
using WMapConst = Eigen::Map<const RowMajorMatrix>;
using VMap = Eigen::Map<Eigen::VectorXd>;
using VMapConst = Eigen::Map<const Eigen::VectorXd>;
}  // namespace

void Mlp::index_layout() {
    w_off_.clear();
    b_off_.clear();
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        w_off_.push_back(off);
        off += static_cast<std::size_t>(widths_[l + 1]) * widths_[l];
        b_off_.push_back(off);
        off += widths_[l + 1];
    }
    theta_.resize(static_cast<Eigen::Index>(off));
}

void Mlp::init_weights(std::uint64_t seed) {
    SplitMix64 rng(seed);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
        const std::size_t n_w = static_cast<std::size_t>(widths_[l + 1]) * widths_[l];
        for (std::size_t i = 0; i < n_w; ++i)
            theta_[static_cast<Eigen::Index>(w_off_[l] + i)] = rng.next_uniform(-bound, bound);
        for (int i = 0; i < widths_[l + 1]; ++i)
            theta_[static_cast<Eigen::Index>(b_off_[l] + i)] = rng.next_uniform(-bound, bound);
    }
}

std::unique_ptr<Mlp> Mlp::make(std::size_t in_dim, std::size_t out_dim, const TrainConfig& cfg) {
    auto net = std::make_unique<Mlp>();
    net->widths_.push_back(static_cast<int>(in_dim));
    if (cfg.mlp_hidden.empty()) {
        net->widths_.insert(net->widths_.end(), {200, 300, 500, 500, 300, 200});
    } else {
        net->widths_.insert(net->widths_.end(), cfg.mlp_hidden.begin(), cfg.mlp_hidden.end());
    }
    net->widths_.push_back(static_cast<int>(out_dim));
    net->index_layout();
    net->init_weights(cfg.seed);
    return net;
}

double Mlp::loss(const TableView& x, const TableView& y, std::span<const std::size_t> rows,
                 Eigen::VectorXd* grad) const {
    const std::size_t batch = rows.size();
    const std::size_t n_layers = widths_.size() - 1;

    Eigen::MatrixXd a(batch, widths_[0]);
    for (std::size_t r = 0; r < batch; ++r)
        for (int c = 0; c < widths_[0]; ++c) a(static_cast<Eigen::Index>(r), c) = x.row(rows[r])[c];

    // Forward, caching pre-activations for the backward pass.
    std::vector<Eigen::MatrixXd> acts;       // a_0 .. a_{L-1}
    std::vector<Eigen::MatrixXd> pre_acts;   // z_1 .. z_L
    acts.push_back(a);
    for (std::size_t l = 0; l < n_layers; ++l) {
        WMapConst w(theta_.data() + w_off_[l], widths_[l + 1], widths_[l]);
        VMapConst b(theta_.data() + b_off_[l], widths_[l + 1]);
        Eigen::MatrixXd z = (acts.back() * w.transpose()).rowwise() + b.transpose();
        pre_acts.push_back(z);
        if (l + 1 < n_layers) acts.push_back(z.cwiseMax(0.0));
    }

    const Eigen::MatrixXd& out = pre_acts.back();
    Eigen::MatrixXd target(batch, widths_.back());
    for (std::size_t r = 0; r < batch; ++r)
        for (int c = 0; c < widths_.back(); ++c)
            target(static_cast<Eigen::Index>(r), c) = y.row(rows[r])[c];

    const Eigen::MatrixXd diff = out - target;
    const double denom = static_cast<double>(batch) * widths_.back();
    const double mse = diff.squaredNorm() / denom;
    if (!grad) return mse;

    grad->setZero(theta_.size());
    Eigen::MatrixXd dz = 2.0 * diff / denom;
    for (std::size_t l = n_layers; l-- > 0;) {
        WMap dw(grad->data() + w_off_[l], widths_[l + 1], widths_[l]);
        VMap db(grad->data() + b_off_[l], widths_[l + 1]);
        dw = dz.transpose() * acts[l];
        db = dz.colwise().sum().transpose();
        if (l > 0) {
            WMapConst w(theta_.data() + w_off_[l], widths_[l + 1], widths_[l]);
            Eigen::MatrixXd da = dz * w;
            dz = ((pre_acts[l - 1].array() > 0.0).cast<double>() * da.array()).matrix();
        }
    }
    return mse;
}

double Mlp::min_abs_preactivation(const TableView& x, std::span<const std::size_t> rows) const {
    const std::size_t n_layers = widths_.size() - 1;
    double min_abs = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd a(rows.size(), widths_[0]);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < widths_[0]; ++c) a(static_cast<Eigen::Index>(r), c) = x.row(rows[r])[c];
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        WMapConst w(theta_.data() + w_off_[l], widths_[l + 1], widths_[l]);
        VMapConst b(theta_.data() + b_off_[l], widths_[l + 1]);
        Eigen::MatrixXd z = (a * w.transpose()).rowwise() + b.transpose();
        min_abs = std::min(min_abs, z.cwiseAbs().minCoeff());
        a = z.cwiseMax(0.0);
    }
    return min_abs;
}

std::unique_ptr<Mlp> Mlp::fit(const TableView& x, const TableView& y, const TrainConfig& cfg,
                              std::vector<double>* curve) {
    if (x.rows < 1) throw TrainingError("mlp needs at least 1 row");
    if (x.rows != y.rows) throw TrainingError("input/target row mismatch");

    auto net = make(x.cols, y.cols, cfg);
    auto losses = adam_minimize(
        net->theta_, x.rows, cfg,
        [&](std::span<const std::size_t> rows, Eigen::VectorXd& grad) {
            return net->loss(x, y, rows, &grad);
        });
    if (curve) *curve = std::move(losses);
    return net;
}

void Mlp::predict_one(std::span<const double> in, std::span<double> out) const {
    Eigen::VectorXd a(widths_[0]);
    for (int c = 0; c < widths_[0]; ++c) a[c] = in[c];
    const std::size_t n_layers = widths_.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        WMapConst w(theta_.data() + w_off_[l], widths_[l + 1], widths_[l]);
        VMapConst b(theta_.data() + b_off_[l], widths_[l + 1]);
        Eigen::VectorXd z = w * a + b;
        a = (l + 1 < n_layers) ? z.cwiseMax(0.0).eval() : z;
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(widths_.back()); ++c) out[c] = a[c];
}

void Mlp::set_theta(const Eigen::VectorXd& t) {
    if (t.size() != theta_.size()) throw TrainingError("set_theta: size mismatch");
    theta_ = t;
}

void Mlp::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, widths_.size());
    for (int w : widths_) io::write_pod<std::int32_t>(out, w);
    std::vector<double> flat(theta_.data(), theta_.data() + theta_.size());
    io::write_vec(out, flat);
}

std::unique_ptr<Mlp> Mlp::load_payload(std::istream& in) {
    auto net = std::make_unique<Mlp>();
    auto n = io::read_pod<std::uint64_t>(in);
    if (n < 2 || n > 64) throw CorruptionError("implausible layer count");
    for (std::uint64_t i = 0; i < n; ++i)
        net->widths_.push_back(io::read_pod<std::int32_t>(in));
    net->index_layout();
    auto flat = io::read_vec(in);
    if (flat.size() != static_cast<std::size_t>(net->theta_.size()))
        throw CorruptionError("mlp parameter size mismatch");
    net->theta_ = Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
    return net;
}

}  // namespace rfsizer
