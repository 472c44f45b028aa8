#include "rfsizer/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "rfsizer/errors.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

void SweepRange::validate() const {
    if (!(increment > 0.0)) throw std::domain_error("range " + name + ": increment must be > 0");
    if (!(begin <= end)) throw std::domain_error("range " + name + ": begin must be <= end");
    if (count() < 1) throw std::domain_error("range " + name + ": empty");
}

int SweepRange::count() const {
    const double slack = 1e-9 * std::abs(end);
    int n = 0;
    while (begin + n * increment <= end + slack) ++n;
    return n;
}

std::vector<double> SweepRange::values() const {
    std::vector<double> v;
    const int n = count();
    v.reserve(n);
    for (int k = 0; k < n; ++k) v.push_back(value(k));
    return v;
}

long long SweepPlan::grid_size() const {
    long long total = 1;
    for (const auto& r : ranges) total *= r.count();
    return total;
}

void SweepPlan::validate() const {
    const auto& sc = schema(block);
    if (ranges.size() != sc.params.size())
        throw SchemaError("plan for " + sc.name + " must have " +
                          std::to_string(sc.params.size()) + " ranges");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        if (ranges[i].name != sc.params[i].name)
            throw SchemaError("plan range " + std::to_string(i) + " is '" + ranges[i].name +
                              "', schema expects '" + sc.params[i].name + "'");
        ranges[i].validate();
    }
}

namespace {

std::vector<SweepRange> leaf_ranges(BlockId block) {
    switch (block) {
        case BlockId::vco:
            return {{"C", 50.0, 50.0, 150.0},        {"L", 60.0, 60.0, 180.0},
                    {"R_p", 300.0, 100.0, 500.0},    {"W_N1", 7.5, 2.5, 12.5},
                    {"W_N2", 187.5, 12.5, 212.5},    {"W_var", 70.0, 10.0, 90.0}};
        case BlockId::pa:
            return {{"L_ip", 175.0, 175.0, 350.0},   {"L_is", 60.0, 60.0, 120.0},
                    {"L_op", 360.0, 353.0, 713.0},   {"L_os", 45.0, 45.0, 90.0},
                    {"W_N1", 22.0, 5.0, 32.0},       {"W_N2", 16.0, 5.0, 26.0}};
        case BlockId::lna:
            return {{"C_1", 130.0, 50.0, 180.0},     {"C_2", 170.0, 50.0, 220.0},
                    {"L_d", 180.0, 50.0, 230.0},     {"L_g", 850.0, 100.0, 950.0},
                    {"L_s", 80.0, 10.0, 90.0},       {"W_N1", 20.0, 3.0, 26.0},
                    {"W_N2", 37.5, 2.5, 42.5}};
        case BlockId::mixer:
            return {{"C", 1.0, 0.1, 1.1},            {"R", 400.0, 100.0, 500.0},
                    {"W_N1", 14.0, 2.0, 18.0},       {"W_N2", 6.0, 2.0, 10.0}};
        case BlockId::cascode:
            return {{"R_D", 300.0, 100.0, 400.0},    {"W_N1", 26.0, 2.0, 30.0},
                    {"W_N2", 14.0, 2.0, 18.0}};
        default:
            throw SchemaError("no leaf sweep table for block " + block_name(block));
    }
}

void append_prefixed(std::vector<SweepRange>& out, const std::string& prefix, BlockId block) {
    for (auto r : leaf_ranges(block)) {
        r.name = prefix + "." + r.name;
        out.push_back(std::move(r));
    }
}

}  // namespace

SweepPlan builtin_plan(BlockId block) {
    SweepPlan plan;
    plan.block = block;
    switch (block) {
        case BlockId::tx_system:
            append_prefixed(plan.ranges, "vco", BlockId::vco);
            append_prefixed(plan.ranges, "pa", BlockId::pa);
            break;
        case BlockId::rx_system:
            append_prefixed(plan.ranges, "lna", BlockId::lna);
            append_prefixed(plan.ranges, "mixer", BlockId::mixer);
            append_prefixed(plan.ranges, "cascode", BlockId::cascode);
            break;
        default:
            plan.ranges = leaf_ranges(block);
    }
    plan.validate();
    return plan;
}

std::vector<std::pair<double, double>> sweep_bounds(BlockId block) {
    std::vector<std::pair<double, double>> bounds;
    for (const auto& r : builtin_plan(block).ranges)
        bounds.emplace_back(r.value(0), r.value(r.count() - 1));
    return bounds;
}

std::vector<std::vector<double>> enumerate_ranges(const std::vector<SweepRange>& ranges) {
    std::vector<std::vector<double>> values;
    long long total = 1;
    for (const auto& r : ranges) {
        r.validate();
        values.push_back(r.values());
        total *= static_cast<long long>(values.back().size());
    }

    std::vector<std::vector<double>> rows;
    rows.reserve(total);
    std::vector<std::size_t> odo(ranges.size(), 0);
    for (long long n = 0; n < total; ++n) {
        std::vector<double> row(ranges.size());
        for (std::size_t i = 0; i < ranges.size(); ++i) row[i] = values[i][odo[i]];
        rows.push_back(std::move(row));
        // last range varies fastest
        for (int i = static_cast<int>(ranges.size()) - 1; i >= 0; --i) {
            if (++odo[i] < values[i].size()) break;
            odo[i] = 0;
        }
    }
    return rows;
}

std::vector<ParamVector> enumerate_grid(const SweepPlan& plan) {
    plan.validate();
    std::vector<ParamVector> points;
    auto rows = enumerate_ranges(plan.ranges);
    points.reserve(rows.size());
    for (auto& row : rows) points.push_back(ParamVector{plan.block, std::move(row)});
    return points;
}

}  // namespace rfsizer
