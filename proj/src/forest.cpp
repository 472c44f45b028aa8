#include "rfsizer/regress/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfsizer/errors.hpp"
#include "rfsizer/rng.hpp"
#include "rfsizer/serialize.hpp"

namespace rfsizer {

namespace {

// Sum of squared errors around the mean, totalled over all targets, given
// per-target sums and sums of squares.
double sse_from_sums(const std::vector<double>& sum, const std::vector<double>& sum2, double n) {
    double sse = 0.0;
    for (std::size_t t = 0; t < sum.size(); ++t) sse += sum2[t] - sum[t] * sum[t] / n;
    return sse;
}

}  // namespace

int RegressionTree::grow(const TableView& x, const TableView& y, std::vector<std::size_t>& rows,
                         std::size_t begin, std::size_t end, int depth, int max_depth) {
    const std::size_t n = end - begin;
    const std::size_t n_targets = y.cols;

    std::vector<double> total_sum(n_targets, 0.0), total_sum2(n_targets, 0.0);
    for (std::size_t i = begin; i < end; ++i)
        for (std::size_t t = 0; t < n_targets; ++t) {
            const double v = y.row(rows[i])[t];
            total_sum[t] += v;
            total_sum2[t] += v * v;
        }
    const double node_sse = sse_from_sums(total_sum, total_sum2, static_cast<double>(n));

    auto make_leaf = [&]() {
        Node leaf;
        leaf.leaf_offset = static_cast<std::int32_t>(leaf_values_.size());
        for (std::size_t t = 0; t < n_targets; ++t)
            leaf_values_.push_back(total_sum[t] / static_cast<double>(n));
        nodes_.push_back(leaf);
        return static_cast<int>(nodes_.size() - 1);
    };

    if (n < 2 || (max_depth > 0 && depth >= max_depth) || node_sse <= 1e-12) return make_leaf();

    // Exhaustive split search: every feature, every boundary between
    // distinct sorted values. First strictly-better candidate wins ties.
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_sse = node_sse - 1e-12;

    std::vector<std::size_t> order(rows.begin() + begin, rows.begin() + end);
    std::vector<double> left_sum(n_targets), left_sum2(n_targets);
    for (std::size_t f = 0; f < x.cols; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double xa = x.row(a)[f], xb = x.row(b)[f];
            return xa < xb || (xa == xb && a < b);
        });
        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        std::fill(left_sum2.begin(), left_sum2.end(), 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t t = 0; t < n_targets; ++t) {
                const double v = y.row(order[i])[t];
                left_sum[t] += v;
                left_sum2[t] += v * v;
            }
            const double xi = x.row(order[i])[f];
            const double xj = x.row(order[i + 1])[f];
            if (xi == xj) continue;
            double sse = 0.0;
            const double nl = static_cast<double>(i + 1);
            const double nr = static_cast<double>(n - i - 1);
            for (std::size_t t = 0; t < n_targets; ++t) {
                const double rs = total_sum[t] - left_sum[t];
                const double rs2 = total_sum2[t] - left_sum2[t];
                sse += left_sum2[t] - left_sum[t] * left_sum[t] / nl + rs2 - rs * rs / nr;
            }
            if (sse < best_sse) {
                best_sse = sse;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (xi + xj);
            }
        }
    }

    if (best_feature < 0) return make_leaf();

    auto mid = std::stable_partition(
        rows.begin() + begin, rows.begin() + end,
        [&](std::size_t r) { return x.row(r)[best_feature] <= best_threshold; });
    const std::size_t split_at = static_cast<std::size_t>(mid - rows.begin());

    const int self = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[self].feature = best_feature;
    nodes_[self].threshold = best_threshold;
    const int left = grow(x, y, rows, begin, split_at, depth + 1, max_depth);
    const int right = grow(x, y, rows, split_at, end, depth + 1, max_depth);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void RegressionTree::fit(const TableView& x, const TableView& y,
                         std::span<const std::size_t> rows, int max_depth) {
    nodes_.clear();
    leaf_values_.clear();
    out_dim_ = y.cols;
    std::vector<std::size_t> work(rows.begin(), rows.end());
    grow(x, y, work, 0, work.size(), 0, max_depth);
}

void RegressionTree::predict(std::span<const double> x, std::span<double> out) const {
    int node = 0;
    while (nodes_[node].feature >= 0)
        node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                                 : nodes_[node].right;
    const double* leaf = leaf_values_.data() + nodes_[node].leaf_offset;
    for (std::size_t t = 0; t < out_dim_; ++t) out[t] = leaf[t];
}

void RegressionTree::save(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, out_dim_);
    io::write_pod<std::uint64_t>(out, nodes_.size());
    for (const auto& n : nodes_) {
        io::write_pod<std::int32_t>(out, n.feature);
        io::write_pod<double>(out, n.threshold);
        io::write_pod<std::int32_t>(out, n.left);
        io::write_pod<std::int32_t>(out, n.right);
        io::write_pod<std::int32_t>(out, n.leaf_offset);
    }
    io::write_vec(out, leaf_values_);
}

RegressionTree RegressionTree::load(std::istream& in) {
    RegressionTree t;
    t.out_dim_ = io::read_pod<std::uint64_t>(in);
    auto n_nodes = io::read_pod<std::uint64_t>(in);
    if (n_nodes > (1ull << 26)) throw CorruptionError("implausible tree size");
    t.nodes_.resize(n_nodes);
    for (auto& n : t.nodes_) {
        n.feature = io::read_pod<std::int32_t>(in);
        n.threshold = io::read_pod<double>(in);
        n.left = io::read_pod<std::int32_t>(in);
        n.right = io::read_pod<std::int32_t>(in);
        n.leaf_offset = io::read_pod<std::int32_t>(in);
    }
    t.leaf_values_ = io::read_vec(in);
    return t;
}

std::unique_ptr<RandomForest> RandomForest::fit(const TableView& x, const TableView& y,
                                                const TrainConfig& cfg) {
    if (x.rows < 2) throw TrainingError("random forest needs at least 2 rows");
    if (x.rows != y.rows) throw TrainingError("input/target row mismatch");
    if (cfg.rf_trees < 1) throw TrainingError("rf_trees must be >= 1");

    auto forest = std::make_unique<RandomForest>();
    forest->in_dim_ = x.cols;
    forest->out_dim_ = y.cols;
    forest->trees_.resize(cfg.rf_trees);
    forest->in_bag_.assign(cfg.rf_trees, std::vector<std::uint8_t>(x.rows, 0));

    SplitMix64 master(cfg.seed);
    for (int t = 0; t < cfg.rf_trees; ++t) {
        SplitMix64 rng = master.fork(static_cast<std::uint64_t>(t));
        std::vector<std::size_t> rows(x.rows);
        if (cfg.rf_bootstrap) {
            for (auto& r : rows) r = static_cast<std::size_t>(rng.next_below(x.rows));
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        for (std::size_t r : rows) forest->in_bag_[t][r] = 1;
        forest->trees_[t].fit(x, y, rows, cfg.rf_max_depth);
    }
    return forest;
}

void RandomForest::predict_one(std::span<const double> in, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> tmp(out_dim_);
    for (const auto& tree : trees_) {
        tree.predict(in, tmp);
        for (std::size_t t = 0; t < out_dim_; ++t) out[t] += tmp[t];
    }
    const double inv = 1.0 / static_cast<double>(trees_.size());
    for (std::size_t t = 0; t < out_dim_; ++t) out[t] *= inv;
}

double RandomForest::oob_mse(const TableView& x, const TableView& y) const {
    if (in_bag_.empty()) throw TrainingError("oob_mse requires a freshly fitted forest");
    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> acc(out_dim_), tmp(out_dim_);
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::fill(acc.begin(), acc.end(), 0.0);
        int n_oob = 0;
        for (std::size_t t = 0; t < trees_.size(); ++t) {
            if (in_bag_[t][r]) continue;
            trees_[t].predict(x.row(r), tmp);
            for (std::size_t k = 0; k < out_dim_; ++k) acc[k] += tmp[k];
            ++n_oob;
        }
        if (n_oob == 0) continue;
        for (std::size_t k = 0; k < out_dim_; ++k) {
            const double d = acc[k] / n_oob - y.row(r)[k];
            total += d * d;
        }
        ++counted;
    }
    if (counted == 0) throw TrainingError("no out-of-bag rows");
    return total / (static_cast<double>(counted) * static_cast<double>(out_dim_));
}

void RandomForest::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, in_dim_);
    io::write_pod<std::uint64_t>(out, out_dim_);
    io::write_pod<std::uint64_t>(out, trees_.size());
    for (const auto& t : trees_) t.save(out);
}

std::unique_ptr<RandomForest> RandomForest::load_payload(std::istream& in) {
    auto forest = std::make_unique<RandomForest>();
    forest->in_dim_ = io::read_pod<std::uint64_t>(in);
    forest->out_dim_ = io::read_pod<std::uint64_t>(in);
    auto n = io::read_pod<std::uint64_t>(in);
    if (n > (1ull << 20)) throw CorruptionError("implausible forest size");
    forest->trees_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) forest->trees_.push_back(RegressionTree::load(in));
    return forest;
}

}  // namespace rfsizer
