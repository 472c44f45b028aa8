#pragma once

#include <map>
#include <string>
#include <vector>

#include "rfsizer/device.hpp"
#include "rfsizer/vectors.hpp"

namespace rfsizer {

enum class OceanSystem { tx, rx };

// One measurement row of the transmitter/receiver script tables. The
// expression text carries ${placeholder} tokens for netlist node names;
// rendering with the default bindings reproduces the published expression
// byte-exactly.
struct MeasurementTemplate {
    std::string metric;        // qualified id, e.g. "vco.phase_noise"
    std::string display_name;  // table row label
    std::vector<std::string> analyses;  // dc | tran | sp | pss | pnoise | pac | psp | qpss
    std::string expression;    // with placeholders
};

using Bindings = std::map<std::string, std::string>;

OceanSystem ocean_system_for(BlockId block);
const std::vector<MeasurementTemplate>& measurement_table(OceanSystem system);
const Bindings& default_bindings(OceanSystem system);

// Expression with placeholders substituted; bindings overlay the defaults.
// Throws on unknown metric or unknown binding key.
std::string render_expression(OceanSystem system, const std::string& metric,
                              const Bindings& overrides = {});

// Complete script: netlist preamble, analysis setup, one measurement per
// metric, and an epilogue printing `metric = value` lines.
std::string emit_script(OceanSystem system, const std::vector<std::string>& metrics,
                        const Bindings& overrides = {});

// One design-variable assignment per parameter, canonical order, values in
// native netlist units (SI-suffix notation, e.g. 50 fF -> "50f").
std::string emit_param_alter(const ParamVector& p);

// Inverse pair of the epilogue's `metric = value` print format. Metric names
// may be bare or block-qualified; specs come back in canonical schema order.
std::string print_results(const SpecVector& specs);
SpecVector parse_results(const std::string& text, BlockId block);

// Abstract simulator contract used by the evaluation loop: parameters in,
// specs out, with the output schema matching the analytic model's.
class SimulatorAdapter {
public:
    virtual ~SimulatorAdapter() = default;
    virtual SpecVector run(const ParamVector& p) const = 0;
    virtual bool supports(BlockId block) const = 0;
    virtual std::uint64_t config_hash() const = 0;
};

// The built-in adapter backed by the analytic model; stands in for an
// external simulator everywhere, including tests of the end-to-end loop.
class AnalyticAdapter final : public SimulatorAdapter {
public:
    AnalyticAdapter() = default;
    AnalyticAdapter(const DeviceConstants& dc, const OperatingPoint& op) : dc_(dc), op_(op) {}

    SpecVector run(const ParamVector& p) const override;
    bool supports(BlockId) const override { return true; }
    std::uint64_t config_hash() const override { return sim_config_hash(dc_, op_); }

    const DeviceConstants& device_constants() const { return dc_; }
    const OperatingPoint& operating_point() const { return op_; }

private:
    DeviceConstants dc_;
    OperatingPoint op_;
};

// Shells out to an external simulator: writes a parameter-alter + measurement
// script, invokes `command <script> <result>`, and parses the result text.
// A nonzero exit status is a simulator failure.
class ExternalOceanAdapter final : public SimulatorAdapter {
public:
    ExternalOceanAdapter(std::string command, std::string workdir, Bindings bindings = {});

    SpecVector run(const ParamVector& p) const override;
    bool supports(BlockId) const override { return true; }
    std::uint64_t config_hash() const override;

private:
    std::string command_;
    std::string workdir_;
    Bindings bindings_;
};

}  // namespace rfsizer
