#include "rfsizer/oceangen.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rfsizer/errors.hpp"
#include "rfsizer/rfmodel.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

namespace {

// Measurement tables. Expressions carry ${node} placeholders; substituting
// the default bindings must reproduce the published script text byte-exactly,
// which the golden tests pin down.
const std::vector<MeasurementTemplate>& tx_table() {
    static const std::vector<MeasurementTemplate> t = {
        {"tx_system.dc_power", "Power Consumption", {"dc"},
         R"OCN(getData(":pwr" ?result "dcOp"))OCN"},
        {"tx_system.bandwidth", "Bandwidth", {"sp"},
         R"OCN((ymax(cross(db10(gt(sp(1 1 ?result "sp") sp(1 2 ?result "sp") sp(2 1 ?result "sp") sp(2 2 ?result "sp"))) (ymax(db10(gt(sp(1 1 ?result "sp") sp(1 2 ?result "sp") sp(2 1 ?result "sp") sp(2 2 ?result "sp")))) - 3) 2 "either" t "time" nil)) - ymin(cross(db10(gt(sp(1 1 ?result "sp") sp(1 2 ?result "sp") sp(2 1 ?result "sp") sp(2 2 ?result "sp"))) (ymax(db10(gt(sp(1 1 ?result "sp") sp(1 2 ?result "sp") sp(2 1 ?result "sp") sp(2 2 ?result "sp")))) - 3) 2 "either" t "time" nil))))OCN"},
        {"tx_system.output_power", "Output Power", {"pss"},
         R"OCN(ymax(dbm(pvr('pss "${out}" "${gnd}" 50.0 '(1)))))OCN"},
        {"tx_system.voltage_swing", "Voltage Swing", {"tran"},
         R"OCN(ymax(v("${out}" ?result "tran")) - ymin(v("${out}" ?result "tran")))OCN"},
        {"vco.tuning_range", "Tuning Range for VCO", {"pss"},
         R"OCN(ymax(harmonic(xval(getData("${vco_out_p}" ?result "pss_fd")) '1)) - ymin(harmonic(xval(getData("${vco_out_p}" ?result "pss_fd")) '1)))OCN"},
        {"vco.phase_noise", "Phase Noise for VCO", {"pss", "pnoise"},
         R"OCN(value(leafValue(pn('pnoise) "${vcont}" 0.6) 1000000))OCN"},
        {"pa.power_gain", "Power Gain for PA", {"pss"},
         R"OCN(ymax(db10((pvi('pss "${pa_out_p}" "${pa_out_m}" "${pa_out_probe}" 0 '(1)) / (- pvi('pss "${vco_out_p}" "${vco_out_m}" "${pa_in_probe}" 0 '1))))))OCN"},
        {"pa.drain_eff", "Drain Efficiency for PA", {"pss"},
         R"OCN(ymax(((- (pvi('pss "${pa_out_p}" "${pa_out_m}" "${pa_out_probe}" 0 '(1)) / (- pvi('pss "${supply_net}" "${gnd}" "${supply_probe}" 0 '0)))) * 100)))OCN"},
        {"pa.pae", "PAE for PA", {"pss"},
         R"OCN(ymax((- ((100.0 * harmonic((spectralPower (i("${pa_out_probe}" ?result "pss_fd") (v("${pa_out_p}" ?result "pss_fd") - v("${pa_out_m}" ?result "pss_fd"))) + spectralPower(i("${pa_in_probe}" ?result "pss_fd") (v("${vco_out_p}" ?result "pss_fd") - v("${vco_out_m}" ?result "pss_fd")))) '(1))) / (- harmonic(spectralPower(i("${supply_probe}" ?result "pss_fd") (v("${supply_net}" ?result "pss_fd") - 0.0)) '(0)))))))OCN"},
    };
    return t;
}

const std::vector<MeasurementTemplate>& rx_table() {
    static const std::vector<MeasurementTemplate> t = {
        {"rx_system.dc_power", "Power Consumption", {"dc"},
         R"OCN(getData(":pwr" ?result "dcOp"))OCN"},
        {"rx_system.gain", "Voltage Gain", {"pss", "pac"},
         R"OCN(ymax(db(vh('pac "${if_out}" '-1))))OCN"},
        {"rx_system.noise_figure", "Noise Figure", {"pss", "psp"},
         R"OCN(ymin(getData("NF" ?result "psp")))OCN"},
        {"lna.power_gain", "Power Gain for LNA", {"qpss"},
         R"OCN(ymax(db10((pvi('qpss "${lna_out_p}" "${lna_out_m}" "${lna_out_probe}" 0) / (- pvi('qpss "${lna_in_p}" "${lna_in_m}" "${lna_in_probe}" 0 '(0 1)))))))OCN"},
        {"lna.noise_figure", "Noise Figure for LNA", {"sp"},
         R"OCN(ymin(db10(getData("F" ?result "sp_noise"))))OCN"},
        {"lna.s11", "S11 for LNA", {"sp"},
         R"OCN(ymin(db(spm('sp 1 1))))OCN"},
        {"mixer.conversion_gain", "Conversion Gain for Mixer", {"qpss"},
         R"OCN(ymax(db10((pvi('qpss "${mix_out_p}" "${mix_out_m}" "${mix_if_probe}" 0) / (- pvi('qpss "${mix_in_p}" "${mix_in_m}" "${mix_rf_probe}" 0 '(0 1)))))))OCN"},
        {"mixer.voltage_swing", "Voltage Swing for Mixer", {"dc", "tran"},
         R"OCN((ymax((vtime('tran "${mix_out_p}") - vtime('tran "${mix_out_m}") - (v("${mix_out_p}" ?result "dcOp") - v("${mix_out_m}" ?result "dcOp")))) - ymin((vtime('tran "${mix_out_p}") - vtime('tran "${mix_out_m}") - (v("${mix_out_p}" ?result "dcOp") - v("${mix_out_m}" ?result "dcOp"))))) / 2)OCN"},
        {"cascode.gain", "Voltage Gain for Cascode Amplifier", {"qpss"},
         R"OCN(ymax(db((vh('qpss "${amp_out_p}") / harmonic(vh('qpss "${amp_in_p}") '((-1 1)))))))OCN"},
    };
    return t;
}

Bindings tx_defaults() {
    return {
        {"netlist", "netlist/tx.scs"},
        {"results_dir", "psf/tx"},
        {"report", "results_tx.txt"},
        {"out", "/OUT"},
        {"gnd", "/gnd!"},
        {"vco_out_p", "/VCO_OUT+"},
        {"vco_out_m", "/VCO_OUT-"},
        {"pa_out_p", "/net7"},
        {"pa_out_m", "/net4"},
        {"pa_out_probe", "/I19/Vout+"},
        {"pa_in_probe", "/I19/Vin+"},
        {"supply_net", "/net8"},
        {"supply_probe", "/V1/PLUS"},
        {"vcont", "Vcont"},
    };
}

Bindings rx_defaults() {
    return {
        {"netlist", "netlist/rx.scs"},
        {"results_dir", "psf/rx"},
        {"report", "results_rx.txt"},
        {"if_out", "/IF_OUT"},
        {"lna_out_p", "/LNA_OUT+"},
        {"lna_out_m", "/LNA_OUT-"},
        {"lna_in_p", "/LNA_IN+"},
        {"lna_in_m", "/LNA_IN-"},
        {"lna_out_probe", "/I0/Vout+"},
        {"lna_in_probe", "/I0/Vin+"},
        {"mix_out_p", "/Mixer_OUT+"},
        {"mix_out_m", "/Mixer_OUT-"},
        {"mix_in_p", "/Mixer_IN+"},
        {"mix_in_m", "/Mixer_IN-"},
        {"mix_if_probe", "/I1/IF+"},
        {"mix_rf_probe", "/I1/RF+"},
        {"amp_out_p", "/Amp_OUT+"},
        {"amp_in_p", "/Amp_IN+"},
    };
}

std::string substitute(const std::string& text, const Bindings& bindings) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto open = text.find("${", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        auto close = text.find('}', open);
        if (close == std::string::npos) throw Error("unterminated placeholder in template");
        const std::string key = text.substr(open + 2, close - open - 2);
        auto it = bindings.find(key);
        if (it == bindings.end()) throw Error("unbound placeholder '" + key + "'");
        out += it->second;
        pos = close + 1;
    }
    return out;
}

Bindings merged_bindings(OceanSystem system, const Bindings& overrides) {
    Bindings b = system == OceanSystem::tx ? tx_defaults() : rx_defaults();
    for (const auto& [key, value] : overrides) {
        if (!b.count(key)) {
            std::string valid;
            for (const auto& [k, v] : b) valid += (valid.empty() ? "" : ", ") + k;
            throw ConfigError("unknown binding '" + key + "' (valid: " + valid + ")");
        }
        b[key] = value;
    }
    return b;
}

const MeasurementTemplate& find_metric(OceanSystem system, const std::string& name) {
    const auto& table = measurement_table(system);
    // qualified id first, then unambiguous bare spec name
    for (const auto& m : table)
        if (m.metric == name) return m;
    const MeasurementTemplate* match = nullptr;
    for (const auto& m : table) {
        auto dot = m.metric.find('.');
        if (m.metric.substr(dot + 1) == name) {
            if (match) throw ConfigError("metric '" + name + "' is ambiguous; use the qualified id");
            match = &m;
        }
    }
    if (match) return *match;
    std::string valid;
    for (const auto& m : table) valid += (valid.empty() ? "" : ", ") + m.metric;
    throw ConfigError("unknown metric '" + name + "' (valid: " + valid + ")");
}

const char* analysis_setup(const std::string& kind) {
    if (kind == "dc") return "analysis('dc ?saveOppoint t)";
    if (kind == "tran") return "analysis('tran ?stop 10n)";
    if (kind == "sp") return "analysis('sp ?start 20G ?stop 36G ?lin 1601 ?donoise t)";
    if (kind == "pss") return "analysis('pss ?fund 28G ?harms 10 ?engine 'harmonicbalance)";
    if (kind == "pnoise")
        return "analysis('pnoise ?sweeptype \"relative\" ?relharmnum 1 ?start 100K ?stop 10M)";
    if (kind == "pac") return "analysis('pac ?sweeptype \"absolute\" ?start 90M ?stop 110M)";
    if (kind == "psp") return "analysis('psp ?ports list(1 2) ?donoise t)";
    if (kind == "qpss")
        return "analysis('qpss ?funds list(\"flo\" \"frf\") ?maxharms list(5 5) ?engine 'shooting)";
    throw ConfigError("unknown analysis kind '" + kind + "'");
}

std::string compose_script(OceanSystem system, const std::vector<std::string>& metrics,
                           const Bindings& overrides, const std::string& alter_section) {
    const Bindings bindings = merged_bindings(system, overrides);
    const char* sys_name = system == OceanSystem::tx ? "tx" : "rx";

    std::vector<const MeasurementTemplate*> selected;
    for (const auto& name : metrics) selected.push_back(&find_metric(system, name));

    std::ostringstream os;
    os << ";; " << sys_name << " measurement script (generated)\n";
    os << "simulator('spectre)\n";
    os << "design(\"" << bindings.at("netlist") << "\")\n";
    os << "resultsDir(\"" << bindings.at("results_dir") << "\")\n";
    if (!alter_section.empty()) os << alter_section;

    if (!selected.empty()) {
        static const char* kOrder[] = {"dc", "tran", "sp", "pss", "pnoise", "pac", "psp", "qpss"};
        for (const char* kind : kOrder) {
            bool needed = false;
            for (const auto* m : selected)
                for (const auto& a : m->analyses) needed = needed || a == kind;
            if (needed) os << analysis_setup(kind) << '\n';
        }
        os << "run()\n";
        for (std::size_t i = 0; i < selected.size(); ++i)
            os << "m" << i + 1 << " = " << substitute(selected[i]->expression, bindings) << '\n';
    }

    os << "rpt = outfile(\"" << bindings.at("report") << "\" \"w\")\n";
    for (std::size_t i = 0; i < selected.size(); ++i)
        os << "fprintf(rpt \"" << selected[i]->metric << " = %.17e\\n\" m" << i + 1 << ")\n";
    os << "close(rpt)\n";
    os << "exit()\n";
    return os.str();
}

}  // namespace

OceanSystem ocean_system_for(BlockId block) {
    switch (block) {
        case BlockId::vco:
        case BlockId::pa:
        case BlockId::tx_system: return OceanSystem::tx;
        default: return OceanSystem::rx;
    }
}

const std::vector<MeasurementTemplate>& measurement_table(OceanSystem system) {
    return system == OceanSystem::tx ? tx_table() : rx_table();
}

const Bindings& default_bindings(OceanSystem system) {
    static const Bindings tx = tx_defaults();
    static const Bindings rx = rx_defaults();
    return system == OceanSystem::tx ? tx : rx;
}

std::string render_expression(OceanSystem system, const std::string& metric,
                              const Bindings& overrides) {
    return substitute(find_metric(system, metric).expression, merged_bindings(system, overrides));
}

std::string emit_script(OceanSystem system, const std::vector<std::string>& metrics,
                        const Bindings& overrides) {
    return compose_script(system, metrics, overrides, "");
}

std::string emit_param_alter(const ParamVector& p) {
    p.validate();
    const auto& sc = schema(p.block);
    std::string out;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const std::string& unit = sc.params[i].unit;
        const char* suffix = "";
        if (unit == "fF") suffix = "f";
        else if (unit == "pF" || unit == "pH") suffix = "p";
        else if (unit == "µm") suffix = "u";
        out += "desVar(\"" + sc.params[i].name + "\" " + format_compact(p.values[i]) + suffix + ")\n";
    }
    return out;
}

std::string print_results(const SpecVector& specs) {
    specs.validate();
    const auto& sc = schema(specs.block);
    std::string out;
    for (std::size_t i = 0; i < specs.values.size(); ++i)
        out += sc.specs[i].name + " = " + g17(specs.values[i]) + "\n";
    return out;
}

SpecVector parse_results(const std::string& text, BlockId block) {
    const auto& sc = schema(block);
    std::vector<double> values(sc.specs.size());
    std::vector<bool> seen(sc.specs.size(), false);

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        const std::string qualifier = sc.name + ".";
        if (key.rfind(qualifier, 0) == 0) key = key.substr(qualifier.size());
        const int idx = sc.spec_index(key);
        if (idx < 0) continue;  // unrelated output line
        double v;
        if (!parse_double(value, v))
            throw ParseError("unparseable number '" + value + "' for metric " + key, lineno);
        values[idx] = v;
        seen[idx] = true;  // last occurrence wins
    }

    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw Error("missing metric '" + sc.specs[i].name + "' in result text for block " +
                        sc.name);
    return SpecVector{block, values};
}

SpecVector AnalyticAdapter::run(const ParamVector& p) const { return eval_block(p, dc_, op_); }

ExternalOceanAdapter::ExternalOceanAdapter(std::string command, std::string workdir,
                                           Bindings bindings)
    : command_(std::move(command)), workdir_(std::move(workdir)), bindings_(std::move(bindings)) {}

SpecVector ExternalOceanAdapter::run(const ParamVector& p) const {
    const OceanSystem system = ocean_system_for(p.block);
    const auto& sc = schema(p.block);

    std::vector<std::string> metrics;
    for (const auto& f : sc.specs) metrics.push_back(sc.name + "." + f.name);
    // System-qualified metric ids only exist for the two system tables; leaf
    // blocks use their own qualified rows of the same table.
    const std::string script =
        compose_script(system, metrics, bindings_, emit_param_alter(p));

    const std::string script_path = workdir_ + "/rfsizer_" + sc.name + ".ocn";
    const std::string result_path = workdir_ + "/rfsizer_" + sc.name + ".out";
    {
        std::ofstream out(script_path, std::ios::binary);
        if (!out) throw IoError("cannot write script: " + script_path);
        out << script;
    }

    const std::string cmd = command_ + " " + script_path + " " + result_path;
    const int status = std::system(cmd.c_str());
    const bool exited = status != -1 && WIFEXITED(status);
    if (!exited || WEXITSTATUS(status) != 0)
        throw Error("simulator failure (command '" + cmd + "' exited with status " +
                    std::to_string(exited ? WEXITSTATUS(status) : -1) + ")");

    std::ifstream in(result_path, std::ios::binary);
    if (!in) throw IoError("simulator produced no result file: " + result_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_results(buf.str(), p.block);
}

std::uint64_t ExternalOceanAdapter::config_hash() const {
    std::string s = command_;
    for (const auto& [k, v] : bindings_) s += "\n" + k + "=" + v;
    return fnv1a64(s.data(), s.size());
}

}  // namespace rfsizer
