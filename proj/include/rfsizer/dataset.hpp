#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfsizer/device.hpp"
#include "rfsizer/sweep.hpp"

namespace rfsizer {

// Rectangular (params, specs) table for one block. Row order is the grid
// enumeration order (last plan parameter varying fastest).
class Dataset {
public:
    Dataset() = default;
    Dataset(BlockId block, std::size_t n_params, std::size_t n_specs)
        : block_(block), n_params_(n_params), n_specs_(n_specs) {}

    BlockId block() const { return block_; }
    std::size_t rows() const { return n_rows_; }
    std::size_t n_params() const { return n_params_; }
    std::size_t n_specs() const { return n_specs_; }

    std::span<const double> param_row(std::size_t i) const {
        return {params_.data() + i * n_params_, n_params_};
    }
    std::span<const double> spec_row(std::size_t i) const {
        return {specs_.data() + i * n_specs_, n_specs_};
    }
    ParamVector param_vector(std::size_t i) const;
    SpecVector spec_vector(std::size_t i) const;

    void append_row(std::span<const double> params, std::span<const double> specs);

    // Fingerprint of the simulator configuration that produced the spec
    // columns; absent for datasets loaded from CSV.
    std::optional<std::uint64_t> sim_hash;

private:
    BlockId block_ = BlockId::vco;
    std::size_t n_params_ = 0;
    std::size_t n_specs_ = 0;
    std::size_t n_rows_ = 0;
    std::vector<double> params_;
    std::vector<double> specs_;
};

// Evaluates the forward model on every grid point of the plan. Model errors
// abort generation, tagged with the offending parameter point.
Dataset generate_dataset(const SweepPlan& plan, const DeviceConstants& dc,
                         const OperatingPoint& op);

// CSV layout: `param:<name>[unit],...,spec:<name>[unit],...` header, then one
// row per grid point, 17 significant digits, LF line endings, UTF-8.
void save_csv(const Dataset& ds, const std::string& path);
Dataset load_csv(const std::string& path);

// Deterministic train/test partition.
struct Split {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
    std::uint64_t seed = 0;
    double test_fraction = 0.2;
};

// Seeded shuffle then partition; |test| = round(f*N) clamped to [1, N-1].
Split split_dataset(const Dataset& ds, std::uint64_t seed, double test_fraction = 0.2);
Split make_split(std::size_t n_rows, std::uint64_t seed, double test_fraction = 0.2);

}  // namespace rfsizer
