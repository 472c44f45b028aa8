#pragma once

#include <vector>

#include "rfsizer/regress/regressor.hpp"

namespace rfsizer {

// Diagnostic nearest-row model: memorizes every (spec, param) pair it is
// fitted on and returns the stored parameters of the closest spec vector
// (squared Euclidean distance, first row wins ties). Querying a memorized
// spec vector reproduces its parameters bit-exactly, which makes this the
// identity-prediction sanity check for the evaluation loop.
class LookupModel final : public Regressor {
public:
    static std::unique_ptr<LookupModel> fit(const TableView& x, const TableView& y);

    ModelKind kind() const override { return ModelKind::lookup; }
    std::size_t input_dim() const override { return in_dim_; }
    std::size_t output_dim() const override { return out_dim_; }
    void predict_one(std::span<const double> in, std::span<double> out) const override;
    void save_payload(std::ostream& out) const override;
    static std::unique_ptr<LookupModel> load_payload(std::istream& in);

private:
    std::vector<double> specs_;
    std::vector<double> params_;
    std::size_t in_dim_ = 0;
    std::size_t out_dim_ = 0;
    std::size_t rows_ = 0;
};

}  // namespace rfsizer
