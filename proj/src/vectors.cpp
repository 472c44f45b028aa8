#include "rfsizer/vectors.hpp"

#include <cmath>
#include <stdexcept>

#include "rfsizer/errors.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

namespace {

std::vector<double> assemble(const BlockSchema& sc, bool params,
                             const std::vector<std::pair<std::string, double>>& kv) {
    const auto& fields = params ? sc.params : sc.specs;
    std::vector<double> out(fields.size());
    std::vector<bool> seen(fields.size(), false);
    for (const auto& [name, value] : kv) {
        int idx = params ? sc.param_index(name) : sc.spec_index(name);
        if (idx < 0) {
            std::string expect;
            for (const auto& f : fields) expect += (expect.empty() ? "" : ", ") + f.name;
            throw SchemaError("unknown " + std::string(params ? "parameter" : "spec") + " '" + name +
                              "' for block " + sc.name + " (expected: " + expect + ")");
        }
        if (seen[idx]) throw SchemaError("duplicate entry '" + name + "'");
        seen[idx] = true;
        out[idx] = value;
    }
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (!seen[i]) throw SchemaError("missing " + std::string(params ? "parameter" : "spec") +
                                        " '" + fields[i].name + "' for block " + sc.name);
    return out;
}

}  // namespace

ParamVector ParamVector::from_named(BlockId b, const std::vector<std::pair<std::string, double>>& kv) {
    ParamVector p{b, assemble(schema(b), true, kv)};
    p.validate();
    return p;
}

double ParamVector::operator[](const std::string& name) const {
    int idx = schema(block).param_index(name);
    if (idx < 0) throw SchemaError("no parameter '" + name + "' in block " + block_name(block));
    return values[idx];
}

double ParamVector::si(const std::string& name) const {
    const auto& sc = schema(block);
    int idx = sc.param_index(name);
    if (idx < 0) throw SchemaError("no parameter '" + name + "' in block " + block_name(block));
    return values[idx] * sc.params[idx].si_scale;
}

void ParamVector::validate() const {
    const auto& sc = schema(block);
    if (values.size() != sc.params.size())
        throw SchemaError("block " + sc.name + " expects " + std::to_string(sc.params.size()) +
                          " parameters, got " + std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::domain_error("parameter " + sc.params[i].name + " must be finite and > 0, got " +
                                    format_compact(values[i]));
    }
}

std::string ParamVector::describe() const {
    const auto& sc = schema(block);
    std::string s = sc.name + "{";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ", ";
        s += sc.params[i].name + "=" + format_compact(values[i]) + " " + sc.params[i].unit;
    }
    return s + "}";
}

SpecVector SpecVector::from_named(BlockId b, const std::vector<std::pair<std::string, double>>& kv) {
    SpecVector s{b, assemble(schema(b), false, kv)};
    s.validate();
    return s;
}

double SpecVector::operator[](const std::string& name) const {
    int idx = schema(block).spec_index(name);
    if (idx < 0) throw SchemaError("no spec '" + name + "' in block " + block_name(block));
    return values[idx];
}

void SpecVector::validate() const {
    const auto& sc = schema(block);
    if (values.size() != sc.specs.size())
        throw SchemaError("block " + sc.name + " expects " + std::to_string(sc.specs.size()) +
                          " specs, got " + std::to_string(values.size()));
}

std::string SpecVector::describe() const {
    const auto& sc = schema(block);
    std::string s = sc.name + "{";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ", ";
        s += sc.specs[i].name + "=" + format_compact(values[i]) + " " + sc.specs[i].unit;
    }
    return s + "}";
}

}  // namespace rfsizer
