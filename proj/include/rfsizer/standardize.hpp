#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rfsizer {

// Per-column affine map to zero mean / unit standard deviation. Needed
// because the spec/parameter columns span ~15 orders of magnitude. Constant
// columns are rejected (their scale is undefined).
class Standardizer {
public:
    Standardizer() = default;

    // `data` is row-major with `cols` columns; `rows` selects the fit subset.
    // `names` is used only for error messages.
    static Standardizer fit(std::span<const double> data, std::size_t cols,
                            std::span<const std::size_t> rows,
                            const std::vector<std::string>& names);

    std::size_t cols() const { return mean_.size(); }

    void transform(std::span<const double> raw, std::span<double> out) const;
    void inverse(std::span<const double> std_vals, std::span<double> out) const;

    std::vector<double> transform(std::span<const double> raw) const;
    std::vector<double> inverse(std::span<const double> std_vals) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return std_; }

    void save(std::ostream& out) const;
    static Standardizer load(std::istream& in);

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

}  // namespace rfsizer
