#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rfsizer/block.hpp"

namespace rfsizer {

// Circuit parameters of one block in table units, ordered per the block
// schema. Values must all be strictly positive.
struct ParamVector {
    BlockId block = BlockId::vco;
    std::vector<double> values;

    ParamVector() = default;
    ParamVector(BlockId b, std::vector<double> v) : block(b), values(std::move(v)) {}

    // Builds from (name, value) pairs in any order; every schema name must
    // appear exactly once.
    static ParamVector from_named(BlockId b, const std::vector<std::pair<std::string, double>>& kv);

    double operator[](const std::string& name) const;
    double si(const std::string& name) const;  // value converted to SI

    // Throws SchemaError / std::domain_error on shape or positivity violations.
    void validate() const;

    std::string describe() const;
};

// Performance metrics of one block, ordered per the block schema.
struct SpecVector {
    BlockId block = BlockId::vco;
    std::vector<double> values;

    SpecVector() = default;
    SpecVector(BlockId b, std::vector<double> v) : block(b), values(std::move(v)) {}

    static SpecVector from_named(BlockId b, const std::vector<std::pair<std::string, double>>& kv);

    double operator[](const std::string& name) const;
    void validate() const;

    std::string describe() const;
};

}  // namespace rfsizer
