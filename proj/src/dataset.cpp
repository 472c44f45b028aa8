#include "rfsizer/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rfsizer/errors.hpp"
#include "rfsizer/rfmodel.hpp"
#include "rfsizer/rng.hpp"

namespace rfsizer {

ParamVector Dataset::param_vector(std::size_t i) const {
    auto row = param_row(i);
    return ParamVector{block_, std::vector<double>(row.begin(), row.end())};
}

SpecVector Dataset::spec_vector(std::size_t i) const {
    auto row = spec_row(i);
    return SpecVector{block_, std::vector<double>(row.begin(), row.end())};
}

void Dataset::append_row(std::span<const double> params, std::span<const double> specs) {
    if (params.size() != n_params_ || specs.size() != n_specs_)
        throw SchemaError("append_row: shape mismatch");
    params_.insert(params_.end(), params.begin(), params.end());
    specs_.insert(specs_.end(), specs.begin(), specs.end());
    ++n_rows_;
}

Dataset generate_dataset(const SweepPlan& plan, const DeviceConstants& dc,
                         const OperatingPoint& op) {
    plan.validate();
    const auto& sc = schema(plan.block);
    Dataset ds(plan.block, sc.params.size(), sc.specs.size());
    ds.sim_hash = sim_config_hash(dc, op);

    for (const auto& point : enumerate_grid(plan)) {
        try {
            const SpecVector specs = eval_block(point, dc, op);
            ds.append_row(point.values, specs.values);
        } catch (const Error& e) {
            throw Error("evaluation failed at " + point.describe() + ": " + e.what());
        }
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw IoError("cannot open for writing: " + path);

    const auto& sc = schema(ds.block());
    std::string header;
    for (const auto& f : sc.params) header += "param:" + f.name + "[" + f.unit + "],";
    for (std::size_t i = 0; i < sc.specs.size(); ++i)
        header += "spec:" + sc.specs[i].name + "[" + sc.specs[i].unit + "]" +
                  (i + 1 < sc.specs.size() ? "," : "");
    out << header << '\n';

    for (std::size_t r = 0; r < ds.rows(); ++r) {
        std::string line;
        for (double v : ds.param_row(r)) line += g17(v) + ",";
        auto specs = ds.spec_row(r);
        for (std::size_t i = 0; i < specs.size(); ++i)
            line += g17(specs[i]) + (i + 1 < specs.size() ? "," : "");
        out << line << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

// Matches the header against every block schema; exactly one must fit.
BlockId infer_block(const std::vector<std::string>& fields) {
    for (BlockId id : kAllBlocks) {
        const auto& sc = schema(id);
        if (fields.size() != sc.params.size() + sc.specs.size()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < sc.params.size() && ok; ++i)
            ok = fields[i] == "param:" + sc.params[i].name + "[" + sc.params[i].unit + "]";
        for (std::size_t i = 0; i < sc.specs.size() && ok; ++i)
            ok = fields[sc.params.size() + i] ==
                 "spec:" + sc.specs[i].name + "[" + sc.specs[i].unit + "]";
        if (ok) return id;
    }
    throw SchemaError("CSV header does not match any block schema");
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const BlockId block = infer_block(split_fields(line));
    const auto& sc = schema(block);
    Dataset ds(block, sc.params.size(), sc.specs.size());

    const std::size_t n_cols = sc.params.size() + sc.specs.size();
    std::vector<double> params(sc.params.size());
    std::vector<double> specs(sc.specs.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != n_cols)
            throw ParseError("expected " + std::to_string(n_cols) + " columns, got " +
                                 std::to_string(fields.size()),
                             lineno);
        for (std::size_t i = 0; i < n_cols; ++i) {
            double v;
            if (!parse_double(fields[i], v))
                throw ParseError("non-numeric cell '" + fields[i] + "' in column " +
                                     std::to_string(i + 1),
                                 lineno);
            if (i < params.size())
                params[i] = v;
            else
                specs[i - params.size()] = v;
        }
        ds.append_row(params, specs);
    }
    return ds;
}

Split make_split(std::size_t n_rows, std::uint64_t seed, double test_fraction) {
    if (n_rows < 2) throw std::domain_error("split needs at least 2 rows");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::domain_error("test_fraction must be in (0, 1), got " +
                                format_compact(test_fraction));

    std::vector<std::size_t> idx(n_rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    shuffle_in_place(std::span<std::size_t>(idx), rng);

    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n_rows)));
    n_test = std::clamp<std::size_t>(n_test, 1, n_rows - 1);

    Split s;
    s.seed = seed;
    s.test_fraction = test_fraction;
    s.test.assign(idx.begin(), idx.begin() + n_test);
    s.train.assign(idx.begin() + n_test, idx.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

Split split_dataset(const Dataset& ds, std::uint64_t seed, double test_fraction) {
    return make_split(ds.rows(), seed, test_fraction);
}

}  // namespace rfsizer
