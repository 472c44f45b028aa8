#pragma once

#include <string>
#include <vector>

#include "rfsizer/vectors.hpp"

namespace rfsizer {

// One begin:increment:end parameter range in table units. Yields
// begin, begin+increment, ... while <= end with 1e-9 relative slack, so
// ranges like 37.5:2.5:42.5 produce exactly 3 points despite FP drift.
struct SweepRange {
    std::string name;
    double begin = 0.0;
    double increment = 0.0;
    double end = 0.0;

    int count() const;
    double value(int k) const { return begin + k * increment; }
    std::vector<double> values() const;
    void validate() const;  // increment > 0, begin <= end, at least one point
};

struct SweepPlan {
    BlockId block = BlockId::vco;
    std::vector<SweepRange> ranges;

    long long grid_size() const;
    // Range names must match the block's parameter schema, in order.
    void validate() const;
};

// The built-in per-block sweep tables; system plans concatenate their
// blocks' plans under prefixed names. Throws SchemaError on unknown block.
SweepPlan builtin_plan(BlockId block);

// [lo, hi] per parameter, used to clamp inverse-design predictions onto the
// explored design space.
std::vector<std::pair<double, double>> sweep_bounds(BlockId block);

// Full Cartesian product, last range varying fastest (odometer order).
std::vector<std::vector<double>> enumerate_ranges(const std::vector<SweepRange>& ranges);
std::vector<ParamVector> enumerate_grid(const SweepPlan& plan);

}  // namespace rfsizer
