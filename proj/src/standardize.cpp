#include "rfsizer/standardize.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "rfsizer/errors.hpp"
#include "rfsizer/serialize.hpp"

namespace rfsizer {

Standardizer Standardizer::fit(std::span<const double> data, std::size_t cols,
                               std::span<const std::size_t> rows,
                               const std::vector<std::string>& names) {
    if (rows.empty()) throw TrainingError("standardizer: no rows to fit");
    Standardizer s;
    s.mean_.assign(cols, 0.0);
    s.std_.assign(cols, 0.0);

    const double n = static_cast<double>(rows.size());
    for (std::size_t r : rows)
        for (std::size_t c = 0; c < cols; ++c) s.mean_[c] += data[r * cols + c];
    for (std::size_t c = 0; c < cols; ++c) s.mean_[c] /= n;

    for (std::size_t r : rows)
        for (std::size_t c = 0; c < cols; ++c) {
            const double d = data[r * cols + c] - s.mean_[c];
            s.std_[c] += d * d;
        }
    for (std::size_t c = 0; c < cols; ++c) {
        s.std_[c] = std::sqrt(s.std_[c] / n);
        if (!(s.std_[c] > 0.0)) {
            const std::string name = c < names.size() ? names[c] : std::to_string(c);
            throw TrainingError("column '" + name +
                                "' is constant over the training rows; it cannot be "
                                "standardized (remove it or vary it in the sweep)");
        }
    }
    return s;
}

void Standardizer::transform(std::span<const double> raw, std::span<double> out) const {
    for (std::size_t c = 0; c < mean_.size(); ++c) out[c] = (raw[c] - mean_[c]) / std_[c];
}

void Standardizer::inverse(std::span<const double> std_vals, std::span<double> out) const {
    for (std::size_t c = 0; c < mean_.size(); ++c) out[c] = std_vals[c] * std_[c] + mean_[c];
}

std::vector<double> Standardizer::transform(std::span<const double> raw) const {
    std::vector<double> out(mean_.size());
    transform(raw, out);
    return out;
}

std::vector<double> Standardizer::inverse(std::span<const double> std_vals) const {
    std::vector<double> out(mean_.size());
    inverse(std_vals, out);
    return out;
}

void Standardizer::save(std::ostream& out) const {
    io::write_vec(out, mean_);
    io::write_vec(out, std_);
}

Standardizer Standardizer::load(std::istream& in) {
    Standardizer s;
    s.mean_ = io::read_vec(in);
    s.std_ = io::read_vec(in);
    if (s.mean_.size() != s.std_.size()) throw CorruptionError("standardizer shape mismatch");
    return s;
}

}  // namespace rfsizer
