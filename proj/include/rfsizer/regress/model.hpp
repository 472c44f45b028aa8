#pragma once

#include <memory>
#include <optional>

#include "rfsizer/dataset.hpp"
#include "rfsizer/regress/regressor.hpp"
#include "rfsizer/standardize.hpp"
#include "rfsizer/vectors.hpp"

namespace rfsizer {

struct PredictOutcome {
    ParamVector params;
    std::vector<bool> clamped;  // per parameter: raw prediction was outside the sweep box
};

// A trained inverse model: standardizers, the core regressor and the sweep
// bounding box it is clamped to. Immutable after fit; predict is const and
// safe to call concurrently.
class FittedModel {
public:
    FittedModel() = default;

    ModelKind kind() const { return core_->kind(); }
    BlockId block() const { return block_; }
    std::uint64_t seed() const { return seed_; }
    double test_fraction() const { return test_fraction_; }
    const Regressor& core() const { return *core_; }

    // Maps specs to parameters: standardize, regress, de-standardize, then
    // clamp each component onto [lo, hi] of the block's sweep range. The
    // lookup diagnostic bypasses standardization and memorizes raw rows.
    PredictOutcome predict_full(const SpecVector& specs) const;
    ParamVector predict(const SpecVector& specs) const;

    void save(const std::string& path) const;
    // expected: require a specific model kind; mismatch raises CorruptionError.
    static FittedModel load(const std::string& path,
                            std::optional<ModelKind> expected = std::nullopt);

    // Assembled by pipeline::train.
    static FittedModel assemble(BlockId block, std::uint64_t seed, double test_fraction,
                                std::unique_ptr<Regressor> core,
                                std::optional<Standardizer> spec_std,
                                std::optional<Standardizer> param_std);

private:
    BlockId block_ = BlockId::vco;
    std::uint64_t seed_ = 0;
    double test_fraction_ = 0.2;
    std::optional<Standardizer> spec_std_;   // absent for lookup
    std::optional<Standardizer> param_std_;  // absent for lookup
    std::vector<std::pair<double, double>> bounds_;
    std::shared_ptr<const Regressor> core_;  // shared so FittedModel stays copyable
};

}  // namespace rfsizer
