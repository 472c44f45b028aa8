#include "rfsizer/regress/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfsizer/errors.hpp"
#include "rfsizer/serialize.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

// The "scale" rule: 1/(d * var) with the variance pooled over every entry
// of the input table.
double scale_gamma(const TableView& x) {
    const std::size_t n = x.rows * x.cols;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x.data[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x.data[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    if (!(var > 0.0)) return 1.0 / static_cast<double>(x.cols);
    return 1.0 / (static_cast<double>(x.cols) * var);
}

// One epsilon-SVR dual solve. Dual variables are indexed t in [0, 2n):
// t < n is alpha_t (direction u=+1), t >= n is alpha*_{t-n} (u=-1).
struct SmoResult {
    std::vector<double> beta;  // alpha - alpha*
    double bias = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

SmoResult smo_solve(const std::vector<double>& kernel, std::size_t n,
                    std::span<const double> y, double c_box, double epsilon, double tol,
                    int max_iter) {
    auto k = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };
    auto u_of = [&](std::size_t t) { return t < n ? 1.0 : -1.0; };
    auto sample = [&](std::size_t t) { return t < n ? t : t - n; };

    std::vector<double> z(2 * n, 0.0);        // dual coordinates
    std::vector<double> grad(2 * n);          // d(objective)/dz
    for (std::size_t t = 0; t < 2 * n; ++t) grad[t] = epsilon - u_of(t) * y[sample(t)];

    SmoResult res;
    res.beta.assign(n, 0.0);

    int iter = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (; iter < max_iter; ++iter) {
        // Maximal violating pair.
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        std::ptrdiff_t i = -1, j = -1;
        for (std::size_t t = 0; t < 2 * n; ++t) {
            const double u = u_of(t);
            const double v = -u * grad[t];
            const bool can_up = (u > 0.0) ? z[t] < c_box : z[t] > 0.0;
            const bool can_down = (u > 0.0) ? z[t] > 0.0 : z[t] < c_box;
            if (can_up && v > m_up) {
                m_up = v;
                i = static_cast<std::ptrdiff_t>(t);
            }
            if (can_down && v < m_low) {
                m_low = v;
                j = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (i < 0 || j < 0) throw TrainingError("svr: degenerate working set");
        gap = m_up - m_low;
        if (gap <= tol) {
            res.bias = 0.5 * (m_up + m_low);
            break;
        }

        const std::size_t si = sample(i), sj = sample(j);
        const double ui = u_of(i), uj = u_of(j);

        // Feasible direction dz_i = ui*t, dz_j = -uj*t changes beta by
        // t*(e_si - e_sj); curvature is the kernel distance.
        double curvature = k(si, si) + k(sj, sj) - 2.0 * k(si, sj);
        if (curvature < 1e-12) curvature = 1e-12;
        double step = gap / curvature;

        const double room_i = ui > 0.0 ? c_box - z[i] : z[i];
        const double room_j = uj > 0.0 ? z[j] : c_box - z[j];
        step = std::min(step, std::min(room_i, room_j));

        z[i] += ui > 0.0 ? step : -step;
        z[j] -= uj > 0.0 ? step : -step;
        res.beta[si] += step;
        res.beta[sj] -= step;
        for (std::size_t t = 0; t < 2 * n; ++t)
            grad[t] += u_of(t) * step * (k(sample(t), si) - k(sample(t), sj));
    }

    if (gap > tol)
        throw TrainingError("svr did not converge in " + std::to_string(max_iter) +
                            " iterations; final duality gap " + format_compact(gap) +
                            " (tolerance " + format_compact(tol) + ")");
    res.gap = gap;
    res.iterations = iter;
    return res;
}

}  // namespace

std::unique_ptr<SvrModel> SvrModel::fit(const TableView& x, const TableView& y,
                                        const TrainConfig& cfg) {
    if (x.rows < 1) throw TrainingError("svr needs at least 1 row");
    if (x.rows != y.rows) throw TrainingError("input/target row mismatch");

    auto model = std::make_unique<SvrModel>();
    model->in_dim_ = x.cols;
    model->n_train_ = x.rows;
    model->x_.assign(x.data, x.data + x.rows * x.cols);
    model->gamma_ = cfg.svr_gamma > 0.0 ? cfg.svr_gamma : scale_gamma(x);

    const std::size_t n = x.rows;
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            kernel[i * n + j] = kernel[j * n + i] = rbf(x.row(i), x.row(j), model->gamma_);

    std::vector<double> target(n);
    for (std::size_t t = 0; t < y.cols; ++t) {
        for (std::size_t r = 0; r < n; ++r) target[r] = y.row(r)[t];
        SmoResult res =
            smo_solve(kernel, n, target, cfg.svr_c, cfg.svr_epsilon, cfg.svr_tol, cfg.svr_max_iter);

        Machine m;
        m.bias = res.bias;
        m.final_gap = res.gap;
        m.iterations = res.iterations;
        for (std::size_t r = 0; r < n; ++r) {
            if (res.beta[r] != 0.0) {
                m.coeff.push_back(res.beta[r]);
                m.support.push_back(r);
            }
        }
        model->machines_.push_back(std::move(m));
    }
    return model;
}

void SvrModel::predict_one(std::span<const double> in, std::span<double> out) const {
    for (std::size_t t = 0; t < machines_.size(); ++t) {
        const Machine& m = machines_[t];
        double acc = m.bias;
        for (std::size_t s = 0; s < m.support.size(); ++s) {
            std::span<const double> xs{x_.data() + m.support[s] * in_dim_, in_dim_};
            acc += m.coeff[s] * rbf(xs, in, gamma_);
        }
        out[t] = acc;
    }
}

void SvrModel::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, in_dim_);
    io::write_pod<std::uint64_t>(out, n_train_);
    io::write_pod<double>(out, gamma_);
    io::write_vec(out, x_);
    io::write_pod<std::uint64_t>(out, machines_.size());
    for (const auto& m : machines_) {
        io::write_vec(out, m.coeff);
        std::vector<std::int32_t> support(m.support.begin(), m.support.end());
        io::write_ivec(out, support);
        io::write_pod<double>(out, m.bias);
        io::write_pod<double>(out, m.final_gap);
        io::write_pod<std::int32_t>(out, m.iterations);
    }
}

std::unique_ptr<SvrModel> SvrModel::load_payload(std::istream& in) {
    auto model = std::make_unique<SvrModel>();
    model->in_dim_ = io::read_pod<std::uint64_t>(in);
    model->n_train_ = io::read_pod<std::uint64_t>(in);
    model->gamma_ = io::read_pod<double>(in);
    model->x_ = io::read_vec(in);
    auto n_machines = io::read_pod<std::uint64_t>(in);
    if (n_machines > (1u << 16)) throw CorruptionError("implausible machine count");
    for (std::uint64_t i = 0; i < n_machines; ++i) {
        Machine m;
        m.coeff = io::read_vec(in);
        auto support = io::read_ivec(in);
        m.support.assign(support.begin(), support.end());
        m.bias = io::read_pod<double>(in);
        m.final_gap = io::read_pod<double>(in);
        m.iterations = io::read_pod<std::int32_t>(in);
        if (m.coeff.size() != m.support.size()) throw CorruptionError("svr machine shape mismatch");
        model->machines_.push_back(std::move(m));
    }
    return model;
}

}  // namespace rfsizer
