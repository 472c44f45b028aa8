#include "rfsizer/device.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rfsizer/errors.hpp"

namespace rfsizer {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string(name) + " must be finite and > 0, got " + format_compact(v));
}

using DcField = double DeviceConstants::*;
using OpField = double OperatingPoint::*;

const std::map<std::string, DcField>& dc_fields() {
    static const std::map<std::string, DcField> m = {
        {"k_gm", &DeviceConstants::k_gm},
        {"k_cgs", &DeviceConstants::k_cgs},
        {"k_var_min", &DeviceConstants::k_var_min},
        {"k_var_max", &DeviceConstants::k_var_max},
        {"j_bias", &DeviceConstants::j_bias},
        {"gamma_noise", &DeviceConstants::gamma_noise},
        {"vdd", &DeviceConstants::vdd},
        {"z0", &DeviceConstants::z0},
        {"q_ind", &DeviceConstants::q_ind},
        {"q_xfmr", &DeviceConstants::q_xfmr},
        {"k_couple", &DeviceConstants::k_couple},
        {"kT", &DeviceConstants::kT},
        {"flicker_corner", &DeviceConstants::flicker_corner},
    };
    return m;
}

const std::map<std::string, OpField>& op_fields() {
    static const std::map<std::string, OpField> m = {
        {"f_rf", &OperatingPoint::f_rf},
        {"f_lo", &OperatingPoint::f_lo},
        {"f_if", &OperatingPoint::f_if},
        {"pn_offset", &OperatingPoint::pn_offset},
        {"pa_pin_start_dbm", &OperatingPoint::pa_pin_start_dbm},
        {"pa_pin_stop_dbm", &OperatingPoint::pa_pin_stop_dbm},
        {"pa_pin_step_db", &OperatingPoint::pa_pin_step_db},
        {"mixer_vin_amp", &OperatingPoint::mixer_vin_amp},
        {"sens_bw", &OperatingPoint::sens_bw},
        {"sens_snr_db", &OperatingPoint::sens_snr_db},
    };
    return m;
}

}  // namespace

void DeviceConstants::validate() const {
    require_positive(k_gm, "k_gm");
    require_positive(k_cgs, "k_cgs");
    require_positive(k_var_min, "k_var_min");
    require_positive(k_var_max, "k_var_max");
    require_positive(j_bias, "j_bias");
    require_positive(gamma_noise, "gamma_noise");
    require_positive(vdd, "vdd");
    require_positive(z0, "z0");
    require_positive(q_ind, "q_ind");
    require_positive(q_xfmr, "q_xfmr");
    require_positive(k_couple, "k_couple");
    require_positive(kT, "kT");
    require_positive(flicker_corner, "flicker_corner");
    if (!(k_var_min < k_var_max))
        throw ConfigError("k_var_min must be < k_var_max (got " + format_compact(k_var_min) +
                          " vs " + format_compact(k_var_max) + ")");
    if (k_couple > 1.0) throw ConfigError("k_couple must be in (0, 1]");
}

void OperatingPoint::validate() const {
    require_positive(f_rf, "f_rf");
    require_positive(f_lo, "f_lo");
    require_positive(f_if, "f_if");
    require_positive(pn_offset, "pn_offset");
    require_positive(pa_pin_step_db, "pa_pin_step_db");
    require_positive(mixer_vin_amp, "mixer_vin_amp");
    require_positive(sens_bw, "sens_bw");
    if (pa_pin_start_dbm > pa_pin_stop_dbm)
        throw ConfigError("pa_pin_start_dbm must be <= pa_pin_stop_dbm");
    // Heterodyne plan: LO sits one IF below RF.
    if (std::abs(f_lo - (f_rf - f_if)) > 1e-6 * f_rf)
        throw ConfigError("f_lo must equal f_rf - f_if (got f_lo=" + format_compact(f_lo) +
                          ", f_rf-f_if=" + format_compact(f_rf - f_if) + ")");
    if (std::abs(lna_gamma_s) >= 1.0 || std::abs(lna_gamma_l) >= 1.0)
        throw ConfigError("|lna_gamma_s| and |lna_gamma_l| must be < 1");
}

bool apply_sim_key(SimConfig& cfg, const std::string& key, const std::string& value) {
    auto parse = [&](const char* what) {
        double v;
        if (!parse_double(value, v))
            throw ConfigError("invalid numeric value '" + value + "' for key " + what);
        return v;
    };
    if (auto it = dc_fields().find(key); it != dc_fields().end()) {
        cfg.dc.*(it->second) = parse(key.c_str());
        return true;
    }
    if (auto it = op_fields().find(key); it != op_fields().end()) {
        cfg.op.*(it->second) = parse(key.c_str());
        return true;
    }
    if (key == "lna_gamma_s_re") { cfg.op.lna_gamma_s.real(parse(key.c_str())); return true; }
    if (key == "lna_gamma_s_im") { cfg.op.lna_gamma_s.imag(parse(key.c_str())); return true; }
    if (key == "lna_gamma_l_re") { cfg.op.lna_gamma_l.real(parse(key.c_str())); return true; }
    if (key == "lna_gamma_l_im") { cfg.op.lna_gamma_l.imag(parse(key.c_str())); return true; }
    return false;
}

SimConfig parse_sim_config(std::istream& in) {
    SimConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value, got '" + line + "'", lineno);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(0, 1);
        if (!apply_sim_key(cfg, key, value))
            throw ConfigError("unknown config key '" + key + "' on line " + std::to_string(lineno));
    }
    cfg.dc.validate();
    cfg.op.validate();
    return cfg;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_sim_config(in);
}

std::uint64_t sim_config_hash(const DeviceConstants& dc, const OperatingPoint& op) {
    std::ostringstream os;
    os << g17(dc.k_gm) << '\n' << g17(dc.k_cgs) << '\n' << g17(dc.k_var_min) << '\n'
       << g17(dc.k_var_max) << '\n' << g17(dc.j_bias) << '\n' << g17(dc.gamma_noise) << '\n'
       << g17(dc.vdd) << '\n' << g17(dc.z0) << '\n' << g17(dc.q_ind) << '\n' << g17(dc.q_xfmr)
       << '\n' << g17(dc.k_couple) << '\n' << g17(dc.kT) << '\n' << g17(dc.flicker_corner) << '\n'
       << g17(op.f_rf) << '\n' << g17(op.f_lo) << '\n' << g17(op.f_if) << '\n'
       << g17(op.pn_offset) << '\n' << g17(op.pa_pin_start_dbm) << '\n'
       << g17(op.pa_pin_stop_dbm) << '\n' << g17(op.pa_pin_step_db) << '\n'
       << g17(op.mixer_vin_amp) << '\n' << g17(op.sens_bw) << '\n' << g17(op.sens_snr_db) << '\n'
       << g17(op.lna_gamma_s.real()) << '\n' << g17(op.lna_gamma_s.imag()) << '\n'
       << g17(op.lna_gamma_l.real()) << '\n' << g17(op.lna_gamma_l.imag()) << '\n';
    const std::string s = os.str();
    return fnv1a64(s.data(), s.size());
}

}  // namespace rfsizer
