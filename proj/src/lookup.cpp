#include "rfsizer/regress/lookup.hpp"

#include <algorithm>
#include <limits>

#include "rfsizer/errors.hpp"
#include "rfsizer/serialize.hpp"

namespace rfsizer {

std::unique_ptr<LookupModel> LookupModel::fit(const TableView& x, const TableView& y) {
    if (x.rows < 1) throw TrainingError("lookup needs at least 1 row");
    if (x.rows != y.rows) throw TrainingError("input/target row mismatch");
    auto m = std::make_unique<LookupModel>();
    m->in_dim_ = x.cols;
    m->out_dim_ = y.cols;
    m->rows_ = x.rows;
    m->specs_.assign(x.data, x.data + x.rows * x.cols);
    m->params_.assign(y.data, y.data + y.rows * y.cols);
    return m;
}

void LookupModel::predict_one(std::span<const double> in, std::span<double> out) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_row = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double d2 = 0.0;
        const double* row = specs_.data() + r * in_dim_;
        for (std::size_t c = 0; c < in_dim_; ++c) {
            const double d = row[c] - in[c];
            d2 += d * d;
        }
        if (d2 < best) {
            best = d2;
            best_row = r;
        }
    }
    const double* params = params_.data() + best_row * out_dim_;
    std::copy(params, params + out_dim_, out.begin());
}

void LookupModel::save_payload(std::ostream& out) const {
    io::write_pod<std::uint64_t>(out, in_dim_);
    io::write_pod<std::uint64_t>(out, out_dim_);
    io::write_pod<std::uint64_t>(out, rows_);
    io::write_vec(out, specs_);
    io::write_vec(out, params_);
}

std::unique_ptr<LookupModel> LookupModel::load_payload(std::istream& in) {
    auto m = std::make_unique<LookupModel>();
    m->in_dim_ = io::read_pod<std::uint64_t>(in);
    m->out_dim_ = io::read_pod<std::uint64_t>(in);
    m->rows_ = io::read_pod<std::uint64_t>(in);
    m->specs_ = io::read_vec(in);
    m->params_ = io::read_vec(in);
    if (m->specs_.size() != m->rows_ * m->in_dim_ || m->params_.size() != m->rows_ * m->out_dim_)
        throw CorruptionError("lookup table shape mismatch");
    return m;
}

}  // namespace rfsizer
